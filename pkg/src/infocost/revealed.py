"""Revealed posterior means and the mean-preserving-contraction gap.

A distribution of posterior means is Bayes-feasible exactly when it is a
mean-preserving contraction (MPC) of the prior: the running integral of
(prior CDF - candidate CDF) stays nonnegative and closes to zero at 1.
That running integral, the "gap", is piecewise linear with kinks only at
atom locations, so every predicate here reduces to finitely many exact
evaluations.

Everything in this module is a pure function over immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import numeric
from .model import Act, Observation, Prior, StateSpace
from .numeric import Scalar


@dataclass(frozen=True)
class DiscreteCDF:
    """Finite-support distribution on [0, 1] as (location, mass) atoms."""

    atoms: tuple[tuple[Scalar, Scalar], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple((z, p) for z, p in self.atoms))
        if not self.atoms:
            raise ValueError("distribution needs at least one atom")
        for z, p in self.atoms:
            if numeric.lt(z, 0) or numeric.gt(z, 1):
                raise ValueError(f"atom location {z!r} outside [0, 1]")
            if not numeric.gt(p, 0):
                raise ValueError(f"atom at {z!r} has non-positive mass {p!r}")
        for (a, _), (b, _) in zip(self.atoms, self.atoms[1:]):
            if not numeric.lt(a, b):
                raise ValueError("atom locations must be strictly increasing")
        total = sum(p for _, p in self.atoms)
        if not numeric.eq(total, 1):
            raise ValueError(f"masses sum to {total!r}, not 1")

    @classmethod
    def from_pairs(cls, pairs) -> "DiscreteCDF":
        """Build from unsorted pairs, merging equal locations, dropping zeros."""
        merged: list[list[Scalar]] = []
        for z, p in sorted(pairs, key=lambda t: t[0]):
            if numeric.is_zero(p):
                continue
            if merged and numeric.eq(merged[-1][0], z):
                merged[-1][1] += p
            else:
                merged.append([z, p])
        return cls(atoms=tuple((z, p) for z, p in merged))

    @classmethod
    def point(cls, z: Scalar) -> "DiscreteCDF":
        one = numeric.scalar(1)
        return cls(atoms=((z, one),))

    @property
    def mean(self) -> Scalar:
        return sum(z * p for z, p in self.atoms)

    @property
    def support(self) -> tuple[Scalar, ...]:
        return tuple(z for z, _ in self.atoms)

    def mass_at(self, z: Scalar) -> Scalar:
        for loc, p in self.atoms:
            if numeric.eq(loc, z):
                return p
        return numeric.scalar(0)

    def value_at(self, z: Scalar) -> Scalar:
        """CDF value P(X <= z)."""
        return sum(p for loc, p in self.atoms if numeric.le(loc, z))


def prior_cdf(prior: Prior) -> DiscreteCDF:
    return DiscreteCDF.from_pairs(
        (z, w)
        for z, w in zip(prior.state_space.states, prior.weights)
        if numeric.gt(w, 0)
    )


def mpc_gap(prior_cdf: DiscreteCDF, f: DiscreteCDF, z: Scalar) -> Scalar:
    """Integral of (prior CDF - f CDF) from 0 to ``z``, exactly.

    Each atom (loc, p) contributes p * max(0, z - loc) to the integral of
    its own CDF, so the gap is a finite sum of hinge terms.
    """
    acc = numeric.scalar(0)
    for loc, p in prior_cdf.atoms:
        if loc < z:
            acc += p * (z - loc)
    for loc, p in f.atoms:
        if loc < z:
            acc -= p * (z - loc)
    return acc


def _kinks(prior_cdf: DiscreteCDF, f: DiscreteCDF) -> list[Scalar]:
    pts = {numeric.scalar(0), numeric.scalar(1)}
    pts.update(prior_cdf.support)
    pts.update(f.support)
    return sorted(pts)


def is_mpc(prior_cdf: DiscreteCDF, f: DiscreteCDF) -> bool:
    """True iff ``f`` is a mean-preserving contraction of the prior.

    The gap is piecewise linear between kinks, so nonnegativity at every
    kink plus a zero at 1 decides the whole continuum.
    """
    for k in _kinks(prior_cdf, f):
        if numeric.lt(mpc_gap(prior_cdf, f, k), 0):
            return False
    return numeric.is_zero(mpc_gap(prior_cdf, f, numeric.scalar(1)))


def gap_zero_intervals(
    prior_cdf: DiscreteCDF, f: DiscreteCDF
) -> tuple[tuple[Scalar, Scalar], ...]:
    """Exact zero set of the gap as maximal closed intervals.

    Point zeros come out as degenerate intervals. Interior zeros of a
    linear piece (possible only when the pair is not an MPC) are solved by
    linear interpolation; in float mode a zero is a |gap| within tolerance.
    """
    ks = _kinks(prior_cdf, f)
    vals = [mpc_gap(prior_cdf, f, k) for k in ks]
    pieces: list[tuple[Scalar, Scalar]] = []

    def add(lo: Scalar, hi: Scalar) -> None:
        if pieces and numeric.ge(pieces[-1][1], lo):
            pieces[-1] = (pieces[-1][0], max(pieces[-1][1], hi))
        else:
            pieces.append((lo, hi))

    for i in range(len(ks) - 1):
        a, b = ks[i], ks[i + 1]
        va, vb = vals[i], vals[i + 1]
        za, zb = numeric.is_zero(va), numeric.is_zero(vb)
        if za and zb:
            add(a, b)
            continue
        if za:
            add(a, a)
        if zb:
            add(b, b)
        if not za and not zb and numeric.sign(va) != numeric.sign(vb):
            t = va / (va - vb)
            x = a + t * (b - a)
            add(x, x)
    return tuple(pieces)


def positive_gap_intervals(
    prior_cdf: DiscreteCDF, f: DiscreteCDF
) -> tuple[tuple[Scalar, Scalar], ...]:
    """Maximal intervals of [0, 1] with nonzero gap strictly inside.

    For an MPC pair these are exactly the regions where the contraction
    constraint is slack.
    """
    zeros = gap_zero_intervals(prior_cdf, f)
    out: list[tuple[Scalar, Scalar]] = []
    edge = numeric.scalar(0)
    for lo, hi in zeros:
        if numeric.lt(edge, lo):
            out.append((edge, lo))
        edge = max(edge, hi)
    if numeric.lt(edge, numeric.scalar(1)):
        out.append((edge, numeric.scalar(1)))
    return tuple(out)


def binding_set(
    prior_cdf: DiscreteCDF, f: DiscreteCDF, state_space: StateSpace
) -> tuple[Scalar, ...]:
    """Grid states where the contraction constraint binds (gap = 0)."""
    if not is_mpc(prior_cdf, f):
        raise ValueError("binding_set requires a mean-preserving contraction")
    return tuple(
        z
        for z in state_space.states
        if numeric.is_zero(mpc_gap(prior_cdf, f, z))
    )


def is_monotone_partitional(prior_cdf: DiscreteCDF, f: DiscreteCDF) -> bool:
    """True iff the gap vanishes somewhere between consecutive support points."""
    if not is_mpc(prior_cdf, f):
        raise ValueError("is_monotone_partitional requires a mean-preserving contraction")
    zeros = gap_zero_intervals(prior_cdf, f)
    supp = f.support
    for z1, z2 in zip(supp, supp[1:]):
        hit = any(numeric.le(lo, z2) and numeric.ge(hi, z1) for lo, hi in zeros)
        if not hit:
            return False
    return True


def unconditional_probability(obs: Observation, act_index: int) -> Scalar:
    return sum(
        obs.sdsc.prob(act_index, zi) * w
        for zi, w in enumerate(obs.prior.weights)
    )


def revealed_posterior_mean(obs: Observation, act: Act) -> Scalar:
    """Bayes-weighted average state conditional on ``act`` being chosen.

    An act never chosen reveals nothing, so it is assigned the prior mean.
    """
    ai = obs.menu.act_index(act.id)
    total = unconditional_probability(obs, ai)
    if numeric.is_zero(total):
        return obs.prior.mean
    weighted = sum(
        z * obs.sdsc.prob(ai, zi) * w
        for zi, (z, w) in enumerate(zip(obs.prior.state_space.states, obs.prior.weights))
    )
    return weighted / total


@dataclass(frozen=True)
class RevealedSummary:
    """Per-act revealed means and probabilities, and the revealed CDF.

    ``decision`` holds the revealed decision weights on the support of the
    revealed CDF, rows per act and columns per support point.
    """

    act_means: tuple[Scalar, ...]
    act_probabilities: tuple[Scalar, ...]
    cdf: DiscreteCDF
    decision: tuple[tuple[Scalar, ...], ...]

    def decision_weight(self, act_index: int, z: Scalar) -> Scalar:
        for si, loc in enumerate(self.cdf.support):
            if numeric.eq(loc, z):
                return self.decision[act_index][si]
        # Off the revealed support the decision function defaults to the
        # unconditional choice probabilities.
        return self.act_probabilities[act_index]


def revealed_summary(obs: Observation) -> RevealedSummary:
    probs = tuple(
        unconditional_probability(obs, ai) for ai in range(len(obs.menu.acts))
    )
    means = tuple(
        revealed_posterior_mean(obs, act) for act in obs.menu.acts
    )
    pairs = [
        (means[ai], probs[ai])
        for ai in range(len(obs.menu.acts))
        if numeric.gt(probs[ai], 0)
    ]
    cdf = DiscreteCDF.from_pairs(pairs)
    decision = tuple(
        tuple(
            (probs[ai] / cdf.mass_at(loc))
            if numeric.gt(probs[ai], 0) and numeric.eq(means[ai], loc)
            else numeric.scalar(0)
            for loc in cdf.support
        )
        for ai in range(len(obs.menu.acts))
    )
    return RevealedSummary(
        act_means=means, act_probabilities=probs, cdf=cdf, decision=decision
    )
