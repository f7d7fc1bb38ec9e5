"""Rationalizability axioms: action switches and posterior-mean cycles.

The cycle axiom is decided through a finite inequality system over
multipliers indexed by (binding point, observation). Feasibility yields
the multipliers that later build the cost derivative and price functions;
infeasibility yields nonnegative weights on ordered act pairs that spell
out a payoff-improving reallocation of posterior means, verified here by
direct multiplication before being reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from . import lp, numeric
from .model import Dataset, utility
from .numeric import Scalar
from .revealed import RevealedSummary, binding_set, prior_cdf, revealed_summary

RowKey = tuple[int, int, int, int]  # (obs_a, obs_b, act_a, act_b) indices
ColKey = tuple[int, Scalar]  # (obs, binding point)


@dataclass(frozen=True)
class NiasViolation:
    observation: int
    chosen: str
    better: str
    gain: Scalar


@dataclass(frozen=True)
class NiasReport:
    passed: bool
    violations: tuple[NiasViolation, ...]


def check_nias(dataset: Dataset) -> NiasReport:
    """Every chosen act must be optimal at its own revealed mean."""
    violations: list[NiasViolation] = []
    for oi, obs in enumerate(dataset.observations):
        summary = revealed_summary(obs)
        for ai, act in enumerate(obs.menu.acts):
            if not numeric.gt(summary.act_probabilities[ai], 0):
                continue
            mean = summary.act_means[ai]
            base = utility(act, mean)
            for alt in obs.menu.acts:
                if alt.id == act.id:
                    continue
                gain = utility(alt, mean) - base
                if numeric.gt(gain, 0):
                    violations.append(
                        NiasViolation(
                            observation=oi, chosen=act.id, better=alt.id, gain=gain
                        )
                    )
    return NiasReport(passed=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class FarkasSystem:
    """The inequality system deciding posterior-mean-cycle rationalizability.

    One row per ordered pair of distinct observations and per (chosen act,
    deviation act); one column per binding point of each observation's
    revealed distribution. Columns at 0 and 1 carry free multipliers, the
    interior ones are sign-constrained.
    """

    rows: tuple[RowKey, ...]
    columns: tuple[ColKey, ...]
    matrix: tuple[tuple[Scalar, ...], ...]
    rhs: tuple[Scalar, ...]
    free_columns: tuple[bool, ...]
    binding_sets: tuple[tuple[Scalar, ...], ...]
    summaries: tuple[RevealedSummary, ...]

    def to_linear_program(
        self, objective: Mapping[int, Scalar] | None = None, sense: str | None = None
    ) -> lp.LinearProgram:
        cons = tuple(
            lp.constraint(
                {j: v for j, v in enumerate(row) if not numeric.is_zero(v)},
                lp.LE,
                b,
            )
            for row, b in zip(self.matrix, self.rhs)
        )
        return lp.LinearProgram(
            num_vars=len(self.columns),
            nonnegative=tuple(not f for f in self.free_columns),
            constraints=cons,
            objective=tuple(objective.items()) if objective else (),
            sense=sense,
        )


def build_farkas_system(dataset: Dataset) -> FarkasSystem:
    """Assemble the multiplier system from revealed statistics.

    Each observation contributes its own binding set, computed against its
    own prior, so single- and multi-prior datasets go through the same
    construction.
    """
    summaries = tuple(revealed_summary(obs) for obs in dataset.observations)
    bindings = tuple(
        binding_set(prior_cdf(obs.prior), summaries[oi].cdf, dataset.state_space)
        for oi, obs in enumerate(dataset.observations)
    )
    columns: list[ColKey] = []
    free: list[bool] = []
    for oi, zs in enumerate(bindings):
        for z in zs:
            columns.append((oi, z))
            free.append(numeric.eq(z, 0) or numeric.eq(z, 1))

    rows: list[RowKey] = []
    matrix: list[tuple[Scalar, ...]] = []
    rhs: list[Scalar] = []
    zero = numeric.scalar(0)
    n = len(dataset.observations)
    for oa in range(n):
        menu_a = dataset.observations[oa].menu
        summ = summaries[oa]
        for ob in range(n):
            if ob == oa:
                continue
            menu_b = dataset.observations[ob].menu
            for ai, act_a in enumerate(menu_a.acts):
                prob = summ.act_probabilities[ai]
                if not numeric.gt(prob, 0):
                    continue
                mean = summ.act_means[ai]
                coeffs = []
                for oi, z in columns:
                    if oi == oa:
                        sgn = 1
                    elif oi == ob:
                        sgn = -1
                    else:
                        coeffs.append(zero)
                        continue
                    if numeric.eq(z, 0):
                        coeffs.append(sgn * prob)
                    elif numeric.le(mean, z):
                        coeffs.append(sgn * (z - mean) * prob)
                    else:
                        coeffs.append(zero)
                base = utility(act_a, mean)
                for bi, act_b in enumerate(menu_b.acts):
                    rows.append((oa, ob, ai, bi))
                    matrix.append(tuple(coeffs))
                    rhs.append((base - utility(act_b, mean)) * prob)
    return FarkasSystem(
        rows=tuple(rows),
        columns=tuple(columns),
        matrix=tuple(matrix),
        rhs=tuple(rhs),
        free_columns=tuple(free),
        binding_sets=bindings,
        summaries=summaries,
    )


@dataclass(frozen=True)
class NipmcVerdict:
    passed: bool
    system: FarkasSystem
    multipliers: dict[ColKey, Scalar] | None = None
    certificate: dict[RowKey, Scalar] | None = None


def _verify_beta(system: FarkasSystem, beta: tuple[Scalar, ...]) -> bool:
    """Direct-multiplication check of the reallocation certificate."""
    if any(numeric.lt(b, 0) for b in beta):
        return False
    for j in range(len(system.columns)):
        s = sum(
            (beta[i] * system.matrix[i][j] for i in range(len(beta))),
            start=numeric.scalar(0),
        )
        if system.free_columns[j]:
            if not numeric.is_zero(s):
                return False
        elif numeric.lt(s, 0):
            return False
    total = sum(
        (b * r for b, r in zip(beta, system.rhs)), start=numeric.scalar(0)
    )
    return numeric.lt(total, 0)


def check_nipmc(dataset: Dataset, *, flattest: bool = False) -> NipmcVerdict:
    """Decide the posterior-mean-cycle axiom via the multiplier system.

    Assumes the action-switch axiom already passed. With ``flattest`` the
    multipliers additionally minimize total interior mass, which makes the
    reported solution reproducible when the feasible set is a polytope.
    """
    system = build_farkas_system(dataset)
    program = system.to_linear_program()
    outcome = lp.solve(program)
    if outcome.status == lp.INFEASIBLE:
        assert outcome.certificate is not None
        if not _verify_beta(system, outcome.certificate):
            raise RuntimeError("infeasibility certificate failed direct verification")
        cert = {
            key: val for key, val in zip(system.rows, outcome.certificate)
        }
        return NipmcVerdict(passed=False, system=system, certificate=cert)
    lam = outcome.x
    if flattest:
        objective = {
            j: numeric.scalar(1)
            for j, f in enumerate(system.free_columns)
            if not f
        }
        refined = lp.solve(system.to_linear_program(objective, lp.MIN))
        if refined.status != lp.OPTIMAL:
            raise RuntimeError("flattest-multiplier selection failed")
        lam = refined.x
    assert lam is not None
    return NipmcVerdict(
        passed=True,
        system=system,
        multipliers={key: val for key, val in zip(system.columns, lam)},
    )


def explain_violation(verdict: NipmcVerdict, dataset: Dataset) -> str:
    """Render a failing verdict as the weighted improving reallocation."""
    if verdict.passed:
        raise ValueError("verdict passed; nothing to explain")
    assert verdict.certificate is not None
    system = verdict.system
    beta = tuple(
        verdict.certificate.get(key, numeric.scalar(0)) for key in system.rows
    )
    if not _verify_beta(system, beta):
        raise ValueError("certificate fails the reallocation conditions")

    gain = sum(
        (b * r for b, r in zip(beta, system.rhs)), start=numeric.scalar(0)
    )
    lines = [
        "improving posterior-mean reallocation found:",
    ]
    for key, weight in zip(system.rows, beta):
        if numeric.is_zero(weight):
            continue
        oa, ob, ai, bi = key
        menu_a = dataset.observations[oa].menu
        menu_b = dataset.observations[ob].menu
        mean = system.summaries[oa].act_means[ai]
        lines.append(
            f"  weight {numeric.format_scalar(weight)}: observation {oa} "
            f"(menu {menu_a.id!r}) act {menu_a.acts[ai].id!r} at revealed mean "
            f"{numeric.format_scalar(mean)} traded against act "
            f"{menu_b.acts[bi].id!r} of observation {ob} (menu {menu_b.id!r})"
        )
    lines.append(
        f"  aggregate payoff change {numeric.format_scalar(gain)} < 0 while "
        "preserving the weighted distribution of posterior means"
    )
    lines.append(
        "  balance holds exactly at the boundary points 0 and 1 and the "
        "contraction conditions hold at every interior binding point"
    )
    return "\n".join(lines)
