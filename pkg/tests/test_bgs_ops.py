"""Elementary bundle operations: errors, directions, criteria, selection."""

import numpy as np
import pytest
from helpers import abs_oracle, quadratic_oracle

from bundlegs.bgs import (
    AggregateAtom,
    BundleAtom,
    ConvexityError,
    SolverConfig,
    aggregate,
    build_initial_model,
    direction_from_dual,
    fdp_perturb,
    improvement_criterion,
    linearization_error,
    select_indices,
    sufficient_decrease,
)
from bundlegs.problems import make_problem
from bundlegs.qp import SimplexQpSolution


def _solution(g, e):
    g = np.asarray(g, float)
    return SimplexQpSolution(lam=np.array([1.0]), g_tilde=g, e_tilde=e,
                             w=0.0, kkt_residual=0.0, iterations=1, converged=True)


class TestLinearizationError:
    def test_abs_same_side(self):
        o = abs_oracle()
        assert linearization_error(o, np.array([1.0]), 1.0, np.array([2.0])) == 0.0

    def test_abs_opposite_side(self):
        o = abs_oracle()
        e = linearization_error(o, np.array([1.0]), 1.0, np.array([-1.0]))
        assert abs(e - 2.0) < 1e-14

    def test_source_point_is_zero(self):
        o = quadratic_oracle(3)
        x = np.array([0.3, -0.2, 1.0])
        assert linearization_error(o, x, o.f(x), x) == 0.0

    def test_strict_mode_flags_nonconvex(self):
        # a broken "concave" oracle yields clearly negative errors
        from bundlegs.problems import ObjectiveOracle

        bad = ObjectiveOracle("bad", 1, 0.0, np.zeros(1),
                              lambda x: -float(x @ x), lambda x: -2.0 * x)
        with pytest.raises(ConvexityError):
            linearization_error(bad, np.array([0.0]), 0.0, np.array([1.0]))

    def test_non_strict_clamps(self):
        from bundlegs.problems import ObjectiveOracle

        bad = ObjectiveOracle("bad", 1, 0.0, np.zeros(1),
                              lambda x: -float(x @ x), lambda x: -2.0 * x)
        e = linearization_error(bad, np.array([0.0]), 0.0, np.array([1.0]), strict=False)
        assert e == 0.0


class TestBuildInitialModel:
    def test_single_atom(self):
        o = quadratic_oracle(2)
        atoms = build_initial_model(o, np.array([1.0, 1.0]), 0.5, 0, np.random.default_rng(0))
        assert len(atoms) == 1
        assert atoms[0].err == 0.0
        np.testing.assert_array_equal(atoms[0].source, [1.0, 1.0])

    def test_errors_bounded_by_curvature(self):
        # for f = ||x||^2 the error equals ||x - s||^2 <= eps^2
        o = quadratic_oracle(4)
        eps = 0.3
        atoms = build_initial_model(o, np.ones(4), eps, 12, np.random.default_rng(1))
        assert len(atoms) == 13
        for a in atoms[1:]:
            assert -1e-14 <= a.err <= eps ** 2 * (1 + 1e-9)

    def test_maxq_errors_nonnegative(self):
        o = make_problem("MAXQ-gen", 2)
        atoms = build_initial_model(o, np.array([1.0, 1.0]), 0.5, 4, np.random.default_rng(2))
        assert all(a.err >= 0.0 for a in atoms)


class TestDirectionFromDual:
    def test_zero_aggregate_terminates(self):
        out = direction_from_dual(_solution([0.0, 0.0], 0.0), 1.0, 0.5)
        assert out.v == 0.0 and out.z == 0.0
        np.testing.assert_array_equal(out.direction, [0.0, 0.0])

    def test_unit_scale(self):
        out = direction_from_dual(_solution([1.0, 0.0], 0.5), 1.0, 0.5)
        np.testing.assert_allclose(out.direction, [-1.0, 0.0])
        assert out.z == -1.5 and out.v == 1.0 and out.w == 1.0

    def test_quarter_scale(self):
        # eps^alpha = 0.25
        out = direction_from_dual(_solution([2.0, 0.0], 0.0), 0.0625, 0.5)
        np.testing.assert_allclose(out.direction, [-0.5, 0.0])
        assert abs(out.z + 1.0) < 1e-14
        assert out.v == 2.0 and out.w == 2.0

    def test_identities_hold(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            g = rng.standard_normal(3)
            e = float(rng.uniform(0, 2))
            eps, alpha = float(rng.uniform(0.01, 2.0)), float(rng.uniform(0.2, 1.5))
            out = direction_from_dual(_solution(g, e), eps, alpha)
            s = eps ** alpha
            assert np.linalg.norm(out.direction + s * g) <= 1e-10
            assert abs(out.z + s * float(g @ g) + e) <= 1e-10
            assert out.z <= 0.0 and out.v >= 0.0


class TestSufficientDecrease:
    def test_zero_step(self):
        o = quadratic_oracle(2)
        assert sufficient_decrease(o, np.zeros(2), 0.0, np.zeros(2), 0.0, 0.5)

    def test_big_drop(self):
        o = quadratic_oracle(2)
        x = np.array([1.0, 0.0])
        assert sufficient_decrease(o, x, 1.0, np.array([-1.0, 0.0]), -1.0, 1e-6)

    def test_increase_fails(self):
        o = abs_oracle()
        assert not sufficient_decrease(o, np.array([1.0]), 1.0, np.array([1.0]), -0.1, 1e-6)


class TestFdpPerturb:
    def test_checks_disabled_returns_trial(self):
        o = abs_oracle()
        rng = np.random.default_rng(0)
        out = fdp_perturb(o, np.array([1.0]), np.array([-1.0]), 0.5, -1.0, 0.1,
                          "FDP1", rng, checks_enabled=False)
        np.testing.assert_array_equal(out, [0.0])

    def test_already_acceptable_is_unchanged(self):
        o = quadratic_oracle(2)
        rng = np.random.default_rng(0)
        x, d = np.array([1.0, 0.0]), np.array([-1.0, 0.0])
        out = fdp_perturb(o, x, d, 0.5, -1.0, 0.1, "FDP1", rng, checks_enabled=True)
        np.testing.assert_array_equal(out, x + d)

    def test_kink_gets_perturbed_within_sigma(self):
        # x + d lands exactly on the kink of |x|; the result must move off it,
        # stay within sigma, and keep the decrease condition
        o = abs_oracle()
        rng = np.random.default_rng(5)
        sigma = 0.05
        x, d = np.array([1.0]), np.array([-1.0])
        out = fdp_perturb(o, x, d, 0.5, -1.0, sigma, "FDP1", rng, checks_enabled=True)
        assert out[0] != 0.0
        assert abs(out[0] - 0.0) < sigma
        assert o.f(out) - o.f(x) <= 0.5 * -1.0

    def test_fdp2_preserves_violation(self):
        # trial lands on the kink while f(x+d) - f(x) = -0.5 > beta*z = -0.9;
        # the perturbation must move off the kink keeping the inequality
        o = abs_oracle()
        rng = np.random.default_rng(6)
        x, d = np.array([0.5]), np.array([-0.5])
        out = fdp_perturb(o, x, d, 0.9, -1.0, 0.05, "FDP2", rng, checks_enabled=True)
        assert out[0] != 0.0
        assert abs(out[0]) < 0.05
        assert o.f(out) - o.f(x) > 0.9 * -1.0

    def test_tiny_sigma_contract(self):
        o = abs_oracle()
        rng = np.random.default_rng(7)
        out = fdp_perturb(o, np.array([1.0]), np.array([-1.0]), 0.5, -1.0, 1e-8,
                          "FDP1", rng, checks_enabled=True)
        assert abs(out[0] - 0.0) <= 1e-8


class TestImprovementCriterion:
    def test_zero_error_enriches(self):
        agg = AggregateAtom(np.array([1.0]), 0.5)
        assert improvement_criterion(0.0, agg, 10.0, 0.9)

    def test_second_clause(self):
        agg = AggregateAtom(np.array([0.0]), 1.0)
        assert improvement_criterion(10.0, agg, 0.5, 0.9)

    def test_both_fail_means_null(self):
        agg = AggregateAtom(np.array([np.sqrt(0.2)]), 1.0)
        assert not improvement_criterion(10.0, agg, 5.0, 0.9)


class TestSelectIndices:
    def test_cumulative_rule(self):
        assert select_indices(np.array([0.5, 0.3, 0.2]), 0.9) == [0, 1]

    def test_theta_zero_keeps_only_forced(self):
        assert select_indices(np.array([0.5, 0.3, 0.2]), 0.0) == []
        assert select_indices(np.array([0.5, 0.3, 0.2]), 0.0, forced=(0,)) == [0]

    def test_theta_one_keeps_all(self):
        assert select_indices(np.array([0.25, 0.25, 0.25, 0.25]), 1.0) == [0, 1, 2, 3]

    def test_unnormalized_weights(self):
        # denominator is the total mass of the given multipliers
        assert select_indices(np.array([0.25, 0.15, 0.1]), 0.9) == [0, 1]

    def test_ties_prefer_lowest_index(self):
        assert select_indices(np.array([0.4, 0.4, 0.2]), 0.5) == [0]

    def test_zero_mass(self):
        assert select_indices(np.zeros(3), 0.9, forced=(1,)) == [1]


class TestAggregate:
    def test_single_atom_identity(self):
        atom = BundleAtom(np.zeros(2), np.array([1.0, 2.0]), 0.25)
        agg = aggregate(np.array([1.0]), [atom])
        np.testing.assert_array_equal(agg.g_tilde, atom.grad)
        assert agg.e_tilde == 0.25

    def test_prior_passthrough(self):
        prior = AggregateAtom(np.array([3.0, -1.0]), 0.7)
        atom = BundleAtom(np.zeros(2), np.array([1.0, 2.0]), 0.25)
        agg = aggregate(np.array([0.0, 1.0]), [atom], prior)
        np.testing.assert_array_equal(agg.g_tilde, prior.g_tilde)
        assert agg.e_tilde == prior.e_tilde

    def test_even_mix(self):
        atoms = [
            BundleAtom(np.zeros(1), np.array([1.0]), 0.0),
            BundleAtom(np.zeros(1), np.array([-1.0]), 2.0),
        ]
        agg = aggregate(np.array([0.5, 0.5]), atoms)
        np.testing.assert_array_equal(agg.g_tilde, [0.0])
        assert agg.e_tilde == 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            aggregate(np.array([0.5, 0.5]), [], AggregateAtom(np.zeros(1), 0.0))


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(mu=1.0)
    with pytest.raises(ValueError):
        SolverConfig(beta=0.0)
    with pytest.raises(ValueError):
        SolverConfig(theta=1.5)
    with pytest.raises(ValueError):
        SolverConfig(eps0=-1.0)
    assert SolverConfig().resolve_m(10) == 20
    assert SolverConfig().resolve_m(50) == 5
    assert SolverConfig(m=7).resolve_m(50) == 7
