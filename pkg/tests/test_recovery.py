"""Envelope construction, cost recovery, and the independent auditor."""

import random
from fractions import Fraction as F

import pytest

from infocost import (
    Act,
    Dataset,
    DiscreteCDF,
    Menu,
    Observation,
    PiecewiseScalarFunction,
    Prior,
    SDSC,
    StateSpace,
    check_nipmc,
    information_cost,
    lambda_to_envelope,
    price_function,
    recover_cost,
    revealed_summary,
    utility,
    variance_cost,
    verify_rationalization,
)


class TestEnvelope:
    def test_zero_multipliers_flat(self):
        env = lambda_to_envelope({(0, F(0)): F(0), (0, F(1)): F(0)}, 0)
        assert env(F(0)) == 0 and env(F(1)) == 0

    def test_intercept_plus_terminal_hinge(self):
        env = lambda_to_envelope({(0, F(0)): F(1), (0, F(1)): F(2)}, 0)
        # 1 + 2(1 - z): affine with slope -2
        assert env(F(0)) == F(3)
        assert env(F(1)) == F(1)
        assert env.slopes() == (F(-2),)

    def test_interior_hinges_make_it_convex(self):
        rng = random.Random(19)
        for _ in range(25):
            cols = {(0, F(0)): F(rng.randint(-3, 3))}
            for _ in range(rng.randint(0, 4)):
                cols[(0, F(rng.randint(1, 11), 12))] = F(rng.randint(0, 5), 2)
            cols[(0, F(1))] = F(rng.randint(-4, 4))
            env = lambda_to_envelope(cols, 0)
            slopes = env.slopes()
            assert all(a <= b for a, b in zip(slopes, slopes[1:]))

    def test_other_observations_ignored(self):
        env = lambda_to_envelope(
            {(0, F(0)): F(1), (1, F(0)): F(99), (1, F(1, 2)): F(7)}, 0
        )
        assert env(F(1, 2)) == F(1)

    def test_price_function_is_the_envelope(self):
        cols = {(0, F(0)): F(1), (0, F(1, 2)): F(3), (0, F(1)): F(0)}
        a = lambda_to_envelope(cols, 0)
        b = price_function(cols, 0)
        assert a.breakpoint_values() == b.breakpoint_values()


class TestRecoverCost:
    def test_single_observation_zero_multipliers(self, three_act_dataset):
        """With a flat envelope the cost is the negated indirect utility."""
        verdict = check_nipmc(three_act_dataset, flattest=True)
        cost = recover_cost(three_act_dataset, verdict.multipliers)
        menu = three_act_dataset.observations[0].menu
        for z in [F(0), F(1, 6), F(1, 4), F(1, 2), F(3, 4), F(1)]:
            assert cost(z) == -max(utility(a, z) for a in menu.acts)

    def test_contact_at_revealed_means(self, three_act_dataset):
        verdict = check_nipmc(three_act_dataset, flattest=True)
        cost = recover_cost(three_act_dataset, verdict.multipliers)
        price = price_function(verdict.multipliers, 0)
        summary = revealed_summary(three_act_dataset.observations[0])
        for ai, act in enumerate(three_act_dataset.observations[0].menu.acts):
            if summary.act_probabilities[ai] == 0:
                continue
            m = summary.act_means[ai]
            assert cost(m) == price(m) - utility(act, m)

    def test_uninformative_observation_contact_at_the_mean(self, four_state_uniform_prior):
        """Data revealing nothing still pins the cost at the prior mean."""
        menu = Menu(id="m", acts=(Act("a", F(1, 3), F(1, 3)),))
        rows = ((F(1),) * 4,)
        ds = Dataset(
            state_space=four_state_uniform_prior.state_space,
            observations=(
                Observation(
                    prior=four_state_uniform_prior, menu=menu, sdsc=SDSC(rows=rows)
                ),
            ),
        )
        verdict = check_nipmc(ds)
        assert verdict.passed
        cost = recover_cost(ds, verdict.multipliers)
        price = price_function(verdict.multipliers, 0)
        z0 = four_state_uniform_prior.mean
        assert cost(z0) == price(z0) - utility(menu.acts[0], z0)

    def test_majorization_is_structural(self, three_act_dataset):
        verdict = check_nipmc(three_act_dataset, flattest=True)
        cost = recover_cost(three_act_dataset, verdict.multipliers)
        price = price_function(verdict.multipliers, 0)
        menu = three_act_dataset.observations[0].menu
        for k in range(25):
            z = F(k, 24)
            assert price(z) >= max(utility(a, z) for a in menu.acts) + cost(z)


class TestVarianceCost:
    def test_null_experiment_costs_nothing(self):
        cost = variance_cost(F(1), F(1, 2))
        assert information_cost(cost, F(1, 2), DiscreteCDF.point(F(1, 2))) == 0

    def test_full_revelation_pays_the_prior_variance(self):
        cost = variance_cost(F(1), F(1, 2))
        full = DiscreteCDF(atoms=((F(0), F(1, 2)), (F(1), F(1, 2))))
        assert information_cost(cost, F(1, 2), full) == F(1, 4)

    def test_scaling_in_kappa(self):
        f = DiscreteCDF(atoms=((F(1, 4), F(1, 2)), (F(3, 4), F(1, 2))))
        c1 = information_cost(variance_cost(F(1), F(1, 2)), F(1, 2), f)
        c2 = information_cost(variance_cost(F(2), F(1, 2)), F(1, 2), f)
        assert c2 == 2 * c1

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            variance_cost(F(0), F(1, 2))
        with pytest.raises(ValueError):
            variance_cost(F(1), F(1))


class TestAuditor:
    def _recovered(self, dataset):
        verdict = check_nipmc(dataset, flattest=True)
        cost = recover_cost(dataset, verdict.multipliers)
        prices = [
            price_function(verdict.multipliers, oi)
            for oi in range(len(dataset.observations))
        ]
        return cost, prices

    def test_construction_passes_all_five(self, three_act_dataset):
        cost, prices = self._recovered(three_act_dataset)
        report = verify_rationalization(three_act_dataset, cost, prices)
        assert report.all_ok
        audit = report.audits[0]
        assert audit.majorization_slack >= 0
        assert audit.contact_slack == 0
        assert audit.integral_slack == 0

    def test_concave_kink_in_price_is_caught(self, three_act_dataset):
        cost, prices = self._recovered(three_act_dataset)
        bent = PiecewiseScalarFunction.from_points(
            [(F(0), F(0)), (F(1, 2), F(1, 2)), (F(1), F(0))]
        )
        price = prices[0] + bent
        report = verify_rationalization(three_act_dataset, cost, [price])
        assert not report.audits[0].price_convex
        assert not report.all_ok

    def test_shifted_cost_loses_contact_keeps_majorization(self, three_act_dataset):
        cost, prices = self._recovered(three_act_dataset)
        lowered = cost.shift(F(-1))
        report = verify_rationalization(three_act_dataset, lowered, prices)
        audit = report.audits[0]
        assert not audit.contact_at_revealed
        assert audit.contact_slack == F(1)
        assert audit.price_majorizes
        assert audit.majorization_slack == F(1)

    def test_kink_in_slack_region_is_caught(self):
        """A price kink strictly inside a slack interval must flip the
        affine-off-binding flag even when convexity survives."""
        space = StateSpace(states=(F(0), F(1)))
        prior = Prior(state_space=space, weights=(F(1, 2), F(1, 2)))
        menu = Menu(id="m", acts=(Act("a", F(0), F(0)),))
        ds = Dataset(
            state_space=space,
            observations=(
                Observation(
                    prior=prior, menu=menu, sdsc=SDSC(rows=((F(1), F(1)),))
                ),
            ),
        )
        cost = PiecewiseScalarFunction.from_points(
            [(F(0), F(-1, 2)), (F(1, 2), F(0)), (F(1), F(-1, 2))]
        )
        kinked = PiecewiseScalarFunction.from_points(
            [(F(0), F(1, 2)), (F(3, 4), F(0)), (F(1), F(1, 2))]
        )
        report = verify_rationalization(ds, cost, [kinked])
        audit = report.audits[0]
        assert not audit.affine_off_binding
        assert audit.affine_slack > 0

    def test_integral_mismatch_is_caught(self, three_act_dataset):
        # kink strictly inside the high pooling interval: the revealed
        # distribution and the prior then integrate the price differently
        cost, _ = self._recovered(three_act_dataset)
        kinked = PiecewiseScalarFunction.from_points(
            [(F(0), F(0)), (F(3, 4), F(0)), (F(1), F(1, 4))]
        )
        report = verify_rationalization(three_act_dataset, cost, [kinked])
        audit = report.audits[0]
        assert not audit.integral_match
        assert audit.integral_slack == abs(F(1, 24) - F(1, 16))
