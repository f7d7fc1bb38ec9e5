"""Exact linear programming: simplex with Bland's rule and Farkas certificates.

The solver works over the active scalar type, so in rational mode every
pivot, every feasibility verdict, and every certificate is exact. Free
variables are split into differences of nonnegatives, inequalities get
slack columns, and rows that still lack a unit column get artificials;
phase one minimizes the artificial mass and, when that minimum is
positive, its multipliers are the infeasibility certificate.

Certificate orientation, for a program with rows ``a_i . x  rel_i  b_i``
and per-variable sign constraints: the returned ``y`` satisfies

* ``y_i >= 0`` on ``<=`` rows, ``y_i <= 0`` on ``>=`` rows, free on ``=``;
* ``sum_i y_i a_ij == 0`` for free variables, ``>= 0`` for nonnegative ones;
* ``y . b < 0``.

Any such ``y`` proves infeasibility by aggregating the rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import numeric
from .numeric import Scalar

LE = "<="
EQ = "="
GE = ">="

MAX = "max"
MIN = "min"

OPTIMAL = "optimal"
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

DEFAULT_PIVOT_LIMIT = 10_000_000


class LPResourceError(RuntimeError):
    """Pivot budget exhausted before the solve finished."""


@dataclass(frozen=True)
class Constraint:
    terms: tuple[tuple[int, Scalar], ...]
    relation: str
    rhs: Scalar

    def __post_init__(self) -> None:
        if self.relation not in (LE, EQ, GE):
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "terms", tuple(self.terms))


def constraint(
    coefficients: Mapping[int, Scalar], relation: str, rhs: Scalar
) -> Constraint:
    terms = tuple(
        sorted((j, v) for j, v in coefficients.items() if not numeric.is_zero(v))
    )
    return Constraint(terms=terms, relation=relation, rhs=rhs)


@dataclass(frozen=True)
class LinearProgram:
    num_vars: int
    nonnegative: tuple[bool, ...]
    constraints: tuple[Constraint, ...]
    objective: tuple[tuple[int, Scalar], ...] = ()
    sense: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "nonnegative", tuple(self.nonnegative))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "objective", tuple(self.objective))
        if len(self.nonnegative) != self.num_vars:
            raise ValueError("one sign flag per variable required")
        if self.sense not in (None, MAX, MIN):
            raise ValueError(f"unknown objective sense {self.sense!r}")
        for con in self.constraints:
            for j, _ in con.terms:
                if not 0 <= j < self.num_vars:
                    raise ValueError(f"constraint column {j} out of range")
        for j, _ in self.objective:
            if not 0 <= j < self.num_vars:
                raise ValueError(f"objective column {j} out of range")


@dataclass(frozen=True)
class LPOutcome:
    status: str
    x: tuple[Scalar, ...] | None = None
    objective_value: Scalar | None = None
    certificate: tuple[Scalar, ...] | None = None


def _row_value(con: Constraint, x: Sequence[Scalar]) -> Scalar:
    return sum((v * x[j] for j, v in con.terms), start=numeric.scalar(0))


def satisfies(lp: LinearProgram, x: Sequence[Scalar]) -> bool:
    """Exact (or tolerance, in float mode) feasibility of a point."""
    for j in range(lp.num_vars):
        if lp.nonnegative[j] and numeric.lt(x[j], 0):
            return False
    for con in lp.constraints:
        lhs = _row_value(con, x)
        ok = {
            LE: numeric.le(lhs, con.rhs),
            EQ: numeric.eq(lhs, con.rhs),
            GE: numeric.ge(lhs, con.rhs),
        }[con.relation]
        if not ok:
            return False
    return True


def verify_certificate(lp: LinearProgram, y: Sequence[Scalar]) -> bool:
    """Check the Farkas conditions for ``y`` by direct multiplication."""
    if len(y) != len(lp.constraints):
        return False
    for yi, con in zip(y, lp.constraints):
        if con.relation == LE and numeric.lt(yi, 0):
            return False
        if con.relation == GE and numeric.gt(yi, 0):
            return False
    combo: dict[int, Scalar] = {}
    for yi, con in zip(y, lp.constraints):
        for j, v in con.terms:
            combo[j] = combo.get(j, numeric.scalar(0)) + yi * v
    for j in range(lp.num_vars):
        s = combo.get(j, numeric.scalar(0))
        if lp.nonnegative[j]:
            if numeric.lt(s, 0):
                return False
        elif not numeric.is_zero(s):
            return False
    yb = sum((yi * con.rhs for yi, con in zip(y, lp.constraints)), start=numeric.scalar(0))
    return numeric.lt(yb, 0)


def _lcm(a: int, b: int) -> int:
    import math

    return a // math.gcd(a, b) * b


def _row_scale(values: Iterable[Scalar]) -> Scalar:
    """Positive multiplier turning the row into integers (rational mode)."""
    if numeric.get_mode() != numeric.RATIONAL:
        return 1.0
    denom = 1
    for v in values:
        denom = _lcm(denom, v.denominator)  # type: ignore[union-attr]
    return denom


class _Tableau:
    """Dense simplex tableau with integer (fraction-free) pivoting.

    In rational mode every row is scaled to integers up front and pivots
    follow the integer-preserving two-term update: each new entry is
    (old * pivot - cross product) divided exactly by the previous pivot.
    The rational tableau is the integer one divided by ``det``, whose sign
    is tracked by every comparison. Float mode keeps the classical update
    with ``det`` pinned at one.
    """

    def __init__(self, lp: LinearProgram, pivot_limit: int):
        self.lp = lp
        self.pivot_limit = pivot_limit
        self.pivots = 0
        self.exact = numeric.get_mode() == numeric.RATIONAL
        zero = 0 if self.exact else 0.0
        one = 1 if self.exact else 1.0

        # Structural columns: nonnegative vars map to one column, free
        # vars to a (plus, minus) pair.
        self.var_cols: list[tuple[int, int | None]] = []
        ncols = 0
        for j in range(lp.num_vars):
            if lp.nonnegative[j]:
                self.var_cols.append((ncols, None))
                ncols += 1
            else:
                self.var_cols.append((ncols, ncols + 1))
                ncols += 2
        self.n_structural = ncols

        m = len(lp.constraints)
        rows = [[zero] * ncols for _ in range(m)]
        rhs = [zero] * m
        self.flip = [1] * m
        self.row_scale: list[Scalar] = [one] * m
        for i, con in enumerate(lp.constraints):
            scale = _row_scale([v for _, v in con.terms] + [con.rhs])
            self.row_scale[i] = scale
            for j, v in con.terms:
                sv = v * scale
                sv = int(sv) if self.exact else sv
                pos, neg = self.var_cols[j]
                rows[i][pos] += sv
                if neg is not None:
                    rows[i][neg] -= sv
            sb = con.rhs * scale
            rhs[i] = int(sb) if self.exact else sb

        # Slack / surplus columns.
        slack_col = [-1] * m
        for i, con in enumerate(lp.constraints):
            if con.relation == EQ:
                continue
            coef = one if con.relation == LE else -one
            for r in range(m):
                rows[r].append(coef if r == i else zero)
            slack_col[i] = ncols
            ncols += 1

        # Normalize to nonnegative right-hand sides.
        for i in range(m):
            if rhs[i] < 0:
                rows[i] = [-v for v in rows[i]]
                rhs[i] = -rhs[i]
                self.flip[i] = -1

        # Unit columns: reuse a slack/surplus column whose coefficient
        # became +1, otherwise add an artificial.
        self.basis: list[int] = []
        self.row_unit_col: list[int] = []
        self.artificial: set[int] = set()
        for i in range(m):
            sc = slack_col[i]
            if sc >= 0 and rows[i][sc] == one:
                self.basis.append(sc)
                self.row_unit_col.append(sc)
                continue
            for r in range(m):
                rows[r].append(one if r == i else zero)
            self.artificial.add(ncols)
            self.basis.append(ncols)
            self.row_unit_col.append(ncols)
            ncols += 1

        self.rows = rows
        self.rhs = rhs
        self.ncols = ncols
        self.obj = [zero] * ncols
        self.obj_rhs = zero
        self.det = one  # previous pivot; rational tableau = integers / det

    # -- rational views ---------------------------------------------------

    def _frac(self, v) -> Scalar:
        if self.exact:
            return Fraction(v, self.det)
        return v / self.det

    def _neg(self, v) -> bool:
        """Sign of a raw entry as a rational quantity."""
        if self.exact:
            return v < 0 if self.det > 0 else v > 0
        scaled = v / self.det
        return scaled < -numeric.FLOAT_TOLERANCE

    def _pos(self, v) -> bool:
        if self.exact:
            return v > 0 if self.det > 0 else v < 0
        scaled = v / self.det
        return scaled > numeric.FLOAT_TOLERANCE

    @property
    def objective_value(self) -> Scalar:
        return -self._frac(self.obj_rhs)

    # -- objectives -------------------------------------------------------

    def set_phase1_objective(self) -> None:
        zero = 0 if self.exact else 0.0
        obj = [zero] * self.ncols
        total = zero
        for i, b in enumerate(self.basis):
            if b in self.artificial:
                row = self.rows[i]
                for j in range(self.ncols):
                    obj[j] -= row[j]
                total += self.rhs[i]
        for c in self.artificial:
            obj[c] += self.det
        self.obj = obj
        self.obj_rhs = -total

    def set_min_objective(self, costs: Sequence[int]) -> None:
        """Reduced-cost row for integer (or float) structural costs."""
        zero = 0 if self.exact else 0.0
        obj = [c * self.det for c in costs] + [zero] * (self.ncols - len(costs))
        value = zero
        for i, b in enumerate(self.basis):
            cb = costs[b] if b < len(costs) else zero
            if cb == 0:
                continue
            row = self.rows[i]
            for j in range(self.ncols):
                obj[j] -= cb * row[j]
            value += cb * self.rhs[i]
        self.obj = obj
        self.obj_rhs = -value

    # -- pivoting ---------------------------------------------------------

    def pivot(self, pr: int, pc: int) -> None:
        self.pivots += 1
        if self.pivots > self.pivot_limit:
            raise LPResourceError(f"pivot limit {self.pivot_limit} exceeded")
        rows = self.rows
        prow = rows[pr]
        piv = prow[pc]
        prhs = self.rhs[pr]
        d = self.det
        if self.exact:
            for r in range(len(rows)):
                if r == pr:
                    continue
                row = rows[r]
                f = row[pc]
                if f:
                    row[:] = [
                        (v * piv - f * p) // d for v, p in zip(row, prow)
                    ]
                    self.rhs[r] = (self.rhs[r] * piv - f * prhs) // d
                elif piv != d:
                    row[:] = [v * piv // d for v in row]
                    self.rhs[r] = self.rhs[r] * piv // d
            f = self.obj[pc]
            if f:
                self.obj = [
                    (v * piv - f * p) // d for v, p in zip(self.obj, prow)
                ]
                self.obj_rhs = (self.obj_rhs * piv - f * prhs) // d
            elif piv != d:
                self.obj = [v * piv // d for v in self.obj]
                self.obj_rhs = self.obj_rhs * piv // d
            self.det = piv
        else:
            inv = 1.0 / piv
            rows[pr] = prow = [v * inv for v in prow]
            self.rhs[pr] = prhs = prhs * inv
            for r in range(len(rows)):
                if r == pr:
                    continue
                f = rows[r][pc]
                if f:
                    rows[r] = [v - f * p for v, p in zip(rows[r], prow)]
                    self.rhs[r] = self.rhs[r] - f * prhs
            f = self.obj[pc]
            if f:
                self.obj = [v - f * p for v, p in zip(self.obj, prow)]
                self.obj_rhs = self.obj_rhs - f * prhs
        self.basis[pr] = pc

    def run_simplex(self, banned: set[int]) -> str:
        """Minimize the current objective; Bland's rule throughout."""
        while True:
            pc = -1
            obj = self.obj
            for j in range(self.ncols):
                if self._neg(obj[j]) and j not in banned:
                    pc = j
                    break
            if pc < 0:
                return OPTIMAL
            pr = -1
            best_rhs = best_piv = None
            for r in range(len(self.rows)):
                a = self.rows[r][pc]
                if not self._pos(a):
                    continue
                if pr < 0:
                    pr, best_rhs, best_piv = r, self.rhs[r], a
                    continue
                # ratio comparison rhs/a < best by cross multiplication;
                # the scale cancels and the product of entries is positive
                left = self.rhs[r] * best_piv
                right = best_rhs * a
                if left < right or (left == right and self.basis[r] < self.basis[pr]):
                    pr, best_rhs, best_piv = r, self.rhs[r], a
            if pr < 0:
                return UNBOUNDED
            self.pivot(pr, pc)

    def drive_out_artificials(self) -> None:
        """After a zero-mass phase one, remove artificials from the basis."""
        r = 0
        while r < len(self.rows):
            if self.basis[r] not in self.artificial:
                r += 1
                continue
            pc = -1
            for j in range(self.ncols):
                if j in self.artificial:
                    continue
                if self._pos(self.rows[r][j]) or self._neg(self.rows[r][j]):
                    pc = j
                    break
            if pc >= 0:
                self.pivot(r, pc)
                r += 1
                continue
            # Fully zero row: the original constraint was redundant.
            del self.rows[r]
            del self.rhs[r]
            del self.basis[r]

    # -- extraction -------------------------------------------------------

    def structural_solution(self) -> tuple[Scalar, ...]:
        col_val: dict[int, Scalar] = {}
        for r, b in enumerate(self.basis):
            col_val[b] = self._frac(self.rhs[r])
        zero = numeric.scalar(0)
        out = []
        for pos, neg in self.var_cols:
            v = col_val.get(pos, zero)
            if neg is not None:
                v = v - col_val.get(neg, zero)
            out.append(v)
        return tuple(out)

    def farkas_certificate(self) -> tuple[Scalar, ...]:
        """Multipliers for the original rows from phase-one reduced costs.

        Reduced costs of each row's initial unit column recover the
        phase-one duals; unflipping and unscaling maps them to the
        caller's rows.
        """
        y = []
        for i, col in enumerate(self.row_unit_col):
            rc = self._frac(self.obj[col])
            y_std = (1 - rc) if col in self.artificial else -rc
            y.append(-self.flip[i] * y_std * self.row_scale[i])
        return tuple(y)


def solve(lp: LinearProgram, *, pivot_limit: int = DEFAULT_PIVOT_LIMIT) -> LPOutcome:
    """Solve ``lp`` exactly; see the module docstring for the contract."""
    tab = _Tableau(lp, pivot_limit)

    tab.set_phase1_objective()
    status = tab.run_simplex(banned=set())
    if status == UNBOUNDED:  # phase-one objective is bounded below by zero
        raise AssertionError("phase one cannot be unbounded")
    if numeric.gt(tab.objective_value, 0):
        return LPOutcome(status=INFEASIBLE, certificate=tab.farkas_certificate())
    tab.drive_out_artificials()

    if lp.sense is None:
        return LPOutcome(status=FEASIBLE, x=tab.structural_solution())

    obj_scale = _row_scale([v for _, v in lp.objective])
    costs = [0 if tab.exact else 0.0] * tab.n_structural
    sign = 1 if lp.sense == MIN else -1
    for j, v in lp.objective:
        sv = v * obj_scale
        sv = int(sv) if tab.exact else sv
        pos, neg = tab.var_cols[j]
        costs[pos] += sign * sv
        if neg is not None:
            costs[neg] -= sign * sv
    tab.set_min_objective(costs)
    status = tab.run_simplex(banned=tab.artificial)
    if status == UNBOUNDED:
        return LPOutcome(status=UNBOUNDED)
    value = tab.objective_value / obj_scale
    if lp.sense == MAX:
        value = -value
    return LPOutcome(status=OPTIMAL, x=tab.structural_solution(), objective_value=value)


def solve_batch(
    lps: Iterable[LinearProgram], *, pivot_limit: int = DEFAULT_PIVOT_LIMIT
) -> list[LPOutcome]:
    """Solve independent programs in order.

    Programs are immutable and solves are pure, so callers may shard this
    across workers; results must stay in input order either way. Errors
    carry the failing program's position.
    """
    out = []
    for i, program in enumerate(lps):
        try:
            out.append(solve(program, pivot_limit=pivot_limit))
        except LPResourceError as err:
            raise LPResourceError(f"program {i}: {err}") from err
    return out


def to_lp_text(lp: LinearProgram, name: str = "program") -> str:
    """Render in the conventional LP text format for external cross-checks.

    Coefficients are emitted as decimal approximations; the format has no
    rational literals, so this dump is for eyeballing and cross-solving,
    not for exact round-trips.
    """

    def num(x: Scalar) -> str:
        return repr(float(x))

    def side(terms: Iterable[tuple[int, Scalar]]) -> str:
        parts = []
        for j, v in terms:
            fv = float(v)
            op = "+" if fv >= 0 else "-"
            parts.append(f"{op} {repr(abs(fv))} x{j}")
        return " ".join(parts) if parts else "0 x0"

    lines = [f"\\ {name}"]
    if lp.sense == MAX:
        lines.append("Maximize")
    else:
        lines.append("Minimize")
    lines.append(f" obj: {side(lp.objective)}")
    lines.append("Subject To")
    for i, con in enumerate(lp.constraints):
        lines.append(f" c{i}: {side(con.terms)} {con.relation} {num(con.rhs)}")
    lines.append("Bounds")
    for j in range(lp.num_vars):
        if not lp.nonnegative[j]:
            lines.append(f" x{j} free")
    lines.append("End")
    return "\n".join(lines) + "\n"
