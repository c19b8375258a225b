import math
from fractions import Fraction

import pytest

from walkmax.difference import check_sufficient_condition, expectation_profile
from walkmax.errors import ParameterError, PoleError, RegimeError
from walkmax.kennedy import (
    compare_pgf,
    discriminant,
    kennedy_build,
    kennedy_function,
    kennedy_pgf,
    kennedy_pgf_oracle,
    kennedy_pole,
)
from walkmax.walk import WalkParams

KENNEDY_CASES = [
    ("1/2", "1/2", "0", "1/2", "1/2", 2),
    ("1/2", "1/2", "0", "1", "1/3", 3),
    ("1/3", "1/3", "1/3", "2/3", "1/2", 1),
    ("2/3", "1/3", "0", "1/2", "1/2", 2),
    ("1/4", "1/2", "1/4", "1/2", "2/3", 2),
]


def build(p, q, r, a, b, n, **kwargs):
    return kennedy_build(a, b, n, WalkParams.from_strings(p, q, r), **kwargs)


class TestBuild:
    def test_roots(self, symmetric):
        kp = kennedy_build("1", "1/2", 1, symmetric)
        assert kp.alpha_plus == pytest.approx(2 + math.sqrt(3))
        assert kp.alpha_minus == pytest.approx(2 - math.sqrt(3))
        assert kp.h[0] == pytest.approx(1 / kp.alpha_plus - 1 / kp.alpha_minus)

    def test_discriminant_is_exact(self, symmetric):
        assert discriminant(Fraction(1, 2), symmetric) == 3

    @pytest.mark.parametrize("b", ["1", "-1"])
    def test_rejects_zero_discriminant(self, symmetric, b):
        with pytest.raises(RegimeError):
            kennedy_build("1/2", b, 2, symmetric)

    def test_rejects_negative_discriminant(self):
        params = WalkParams.from_strings("1/3", "1/3", "1/3")
        with pytest.raises(RegimeError):
            kennedy_build("1/2", "2", 1, params)

    @pytest.mark.parametrize("a, b, n", [("0", "1/2", 1), ("1/2", "0", 1), ("1/2", "1/2", 0)])
    def test_rejects_parameters(self, symmetric, a, b, n):
        with pytest.raises(ParameterError):
            kennedy_build(a, b, n, symmetric)

    def test_default_grid(self, symmetric):
        assert kennedy_build("1/2", "1/2", 3, symmetric).x_max == 12
        assert kennedy_build("1/2", "1/2", 20, symmetric).x_max == 20


class TestSufficientCondition:
    @pytest.mark.parametrize("case", KENNEDY_CASES)
    def test_residuals_vanish(self, case):
        kp = build(*case)
        f = kennedy_function(kp, 10, 10, 10)
        report = check_sufficient_condition(f, kp.params)
        assert report.within(1e-12)

    @pytest.mark.parametrize("case", KENNEDY_CASES)
    def test_expectation_is_constant(self, case):
        kp = build(*case)
        profile = expectation_profile(kennedy_function(kp, 12, 12, 12), kp.params)
        start = profile[0]
        assert start == pytest.approx(kp.h[0])
        for value in profile:
            assert abs(value - start) <= 1e-10 * abs(start)


class TestGeneratingFunction:
    def test_first_drawdown_of_one(self, symmetric):
        """Drawdown 1 is first reached at the first down-step: E[b^tau] = (b/2) / (1 - b/2)."""
        kp = kennedy_build("1", "1/2", 1, symmetric)
        assert kennedy_pgf(kp) == pytest.approx(1 / 3, rel=1e-12)

    def test_first_drawdown_with_position(self, symmetric):
        kp = kennedy_build("3/4", "1/2", 1, symmetric)
        ab = 0.75 * 0.5 / 2
        assert kennedy_pgf(kp) == pytest.approx(0.75**-2 * ab / (1 - ab), rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("a", ["1", "3/4", "4/3"])
    @pytest.mark.parametrize("b", ["1/2", "1/3", "-1/2"])
    def test_matches_truncated_oracle(self, symmetric, n, a, b):
        comparison = compare_pgf(kennedy_build(a, b, n, symmetric), horizon=200)
        assert comparison.tail_bound < 1e-10
        assert comparison.difference <= 1e-10
        assert comparison.passed

    def test_outside_convergence_is_inconclusive(self, symmetric):
        comparison = compare_pgf(kennedy_build("5", "1/2", 1, symmetric), horizon=200)
        assert comparison.tail_bound == math.inf
        assert comparison.oracle > 1e15
        assert not comparison.conclusive
        assert not comparison.passed

    def test_oracle_with_holding(self):
        kp = build("1/3", "1/3", "1/3", "1", "1/2", 2)
        oracle, tail = kennedy_pgf_oracle(kp, 200)
        assert abs(oracle - kennedy_pgf(kp)) <= tail + 1e-10

    def test_oracle_horizon_zero(self, symmetric):
        oracle, tail = kennedy_pgf_oracle(kennedy_build("1", "1/2", 1, symmetric), 0)
        assert oracle == 0
        assert tail == pytest.approx(0.5 / 0.5)

    def test_pole(self, symmetric):
        assert kennedy_pole("1/2", 1, symmetric) == pytest.approx(4.0)
        with pytest.raises(PoleError):
            kennedy_pgf(kennedy_build("4", "1/2", 1, symmetric))
