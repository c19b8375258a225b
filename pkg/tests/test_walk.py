from fractions import Fraction

import numpy as np
import pytest

from conftest import PARAM_GRID
from walkmax.errors import OracleTooLargeError, ParameterError
from walkmax.rng import make_generator
from walkmax.walk import (
    JointDist,
    PathSample,
    WalkParams,
    aggregate_paths,
    enumerate_paths,
    evolve,
    iter_paths,
    joint_dist,
    sample_steps,
    simulate,
)


class TestWalkParams:
    def test_r_defaults_to_remainder(self):
        params = WalkParams.from_strings("1/3", "1/4")
        assert params.r == Fraction(5, 12)

    @pytest.mark.parametrize(
        "p, q, r",
        [("1/2", "1/3", "1/3"), ("0", "1", "0"), ("1/2", "1/2", "-1/2"), ("0.5", "0.5", "0")],
    )
    def test_rejects_invalid_laws(self, p, q, r):
        with pytest.raises(ParameterError):
            WalkParams.from_strings(p, q, r)

    def test_regime(self, symmetric, upward):
        assert symmetric.regime == "p=q"
        assert upward.regime == "p>q"
        assert WalkParams.from_strings("1/4", "1/2").regime == "p<q"

    def test_step_thresholds_are_exact(self, symmetric):
        assert symmetric.step_thresholds() == (2**63, 2**64)
        thirds = WalkParams.from_strings("1/3", "1/3", "1/3")
        t_up, t_down = thirds.step_thresholds()
        assert t_up == -(-(2**64) // 3)
        assert t_down == -(-(2**65) // 3)


class TestJointDist:
    def test_first_steps(self, symmetric):
        assert dict(joint_dist(symmetric, 1).mass) == {(-1, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)}
        assert dict(joint_dist(symmetric, 2).mass) == {
            (-2, 0): Fraction(1, 4),
            (0, 0): Fraction(1, 4),
            (0, 1): Fraction(1, 4),
            (2, 2): Fraction(1, 4),
        }

    def test_point_mass_at_zero(self, upward):
        assert dict(joint_dist(upward, 0).mass) == {(0, 0): Fraction(1)}

    def test_rejects_bad_mass(self):
        with pytest.raises(ParameterError):
            JointDist(1, {(1, 1): Fraction(1, 2)})
        with pytest.raises(ParameterError):
            JointDist(1, {(2, 2): Fraction(1)})

    @pytest.mark.parametrize("params", PARAM_GRID)
    def test_support_and_mass(self, params):
        for t in range(0, 13):
            law = joint_dist(params, t)
            assert sum(law.mass.values()) == 1
            for z, m in law.states():
                assert max(z, 0) <= m <= t
                assert -t <= z <= t

    @pytest.mark.parametrize("params", PARAM_GRID)
    def test_mean_of_position(self, params):
        for t in (1, 5, 12):
            law = joint_dist(params, t)
            assert law.expectation(lambda z, m: Fraction(z)) == t * (params.p - params.q)

    def test_second_moment_symmetric(self, symmetric, lazy_symmetric):
        assert joint_dist(symmetric, 9).expectation(lambda z, m: Fraction(z * z)) == 9
        assert joint_dist(lazy_symmetric, 9).expectation(lambda z, m: Fraction(z * z)) == Fraction(9, 2)

    def test_marginals(self, symmetric):
        law = joint_dist(symmetric, 2)
        assert law.marginal_max() == {0: Fraction(1, 2), 1: Fraction(1, 4), 2: Fraction(1, 4)}
        assert law.marginal_position() == {-2: Fraction(1, 4), 0: Fraction(1, 2), 2: Fraction(1, 4)}

    def test_max_is_monotone_in_p(self):
        """Raising p (with r fixed) raises every tail of M_t."""
        r = Fraction(1, 5)
        ps = [Fraction(k, 10) for k in range(1, 8)]
        for t in (4, 9):
            tails = []
            for p in ps:
                law = joint_dist(WalkParams(p, 1 - r - p, r), t).marginal_max()
                tails.append([sum(w for m, w in law.items() if m >= k) for k in range(t + 1)])
            for lower, higher in zip(tails, tails[1:]):
                assert all(a <= b for a, b in zip(lower, higher))


class TestOracle:
    @pytest.mark.parametrize("params", PARAM_GRID)
    def test_matches_dynamic_programming(self, params):
        for t in range(0, 9):
            assert aggregate_paths(enumerate_paths(params, t), t) == joint_dist(params, t)

    @pytest.mark.parametrize("params", PARAM_GRID)
    def test_matches_at_largest_grid_time(self, params):
        assert aggregate_paths(iter_paths(params, 12), 12) == joint_dist(params, 12)

    def test_path_weights_sum_to_one(self):
        params = PARAM_GRID[1]
        paths = enumerate_paths(params, 5)
        assert len(paths) == 3**5
        assert sum(weight for _, weight in paths) == 1

    def test_cap(self, symmetric):
        with pytest.raises(OracleTooLargeError, match="oracle too large"):
            enumerate_paths(symmetric, 15)
        assert len(enumerate_paths(symmetric, 3, cap=3)) == 8

    def test_evolve_matches_paths(self, upward):
        law = evolve(joint_dist(upward, 3), upward)
        assert law == aggregate_paths(enumerate_paths(upward, 4), 4)


class TestSimulation:
    def test_reproducible(self, symmetric):
        assert simulate(symmetric, 64, seed=11) == simulate(symmetric, 64, seed=11)
        assert simulate(symmetric, 64, seed=11) != simulate(symmetric, 64, seed=12)

    def test_path_consistency(self):
        params = WalkParams.from_strings("1/3", "1/3", "1/3")
        path = simulate(params, 200, seed=3)
        assert path.horizon == 200
        assert path == PathSample.from_steps(path.steps)
        assert set(path.steps) <= {-1, 0, 1}
        assert path.z[0] == 0 and path.m[0] == 0

    def test_no_holds_without_r(self, symmetric):
        assert 0 not in simulate(symmetric, 500, seed=5).steps

    def test_step_frequencies(self):
        params = WalkParams.from_strings("1/5", "1/2", "3/10")
        steps = sample_steps(params, make_generator(2024), 200_000)
        assert abs(np.mean(steps == 1) - 0.2) < 0.005
        assert abs(np.mean(steps == -1) - 0.5) < 0.005
        assert abs(np.mean(steps == 0) - 0.3) < 0.005

    def test_rejects_negative_inputs(self, symmetric):
        with pytest.raises(ParameterError):
            simulate(symmetric, -1, seed=0)
        with pytest.raises(ParameterError):
            simulate(symmetric, 10, seed=-3)


def test_exports_only_walk_names():
    from walkmax import walk

    assert "Rational" not in walk.__all__
    assert not hasattr(walk, "logger")
    for name in set(walk.__all__) - {"State"}:
        assert getattr(walk, name).__module__ == "walkmax.walk"
