from fractions import Fraction

import pytest

from conftest import PARAM_GRID
from walkmax.difference import (
    TimeSpaceFunction,
    check_sufficient_condition,
    diff_ops,
    expectation_profile,
)
from walkmax.errors import CoverageError, DomainError, ParameterError


def compensated_position(params):
    """Z_t - t(p - q) written in (t, drawdown, maximum) coordinates."""
    return lambda t, x, y: Fraction(y - x) - t * (params.p - params.q)


def compensated_square(params):
    """(Z_t - t(p - q))^2 - t(p + q - (p - q)^2)."""
    drift = params.p - params.q
    variance = params.p + params.q - drift * drift
    return lambda t, x, y: (Fraction(y - x) - t * drift) ** 2 - t * variance


class TestTimeSpaceFunction:
    def test_grid_access(self):
        f = TimeSpaceFunction.from_callable(lambda t, x, y: Fraction(t + 10 * x + 100 * y), 2, 3, 4)
        assert f.bounds == (2, 3, 4)
        assert f.exact
        assert f(1, 2, 3) == 321
        with pytest.raises(DomainError):
            f(3, 0, 0)
        with pytest.raises(DomainError):
            f(0, -1, 0)

    def test_read_only(self):
        f = TimeSpaceFunction.from_callable(lambda t, x, y: float(t), 1, 1, 1, exact=False)
        assert not f.exact
        with pytest.raises(ValueError):
            f.values[0, 0, 0] = 1.0

    def test_diff_ops(self):
        f = TimeSpaceFunction.from_callable(lambda t, x, y: Fraction(t * t + 2 * x + 3 * y), 3, 3, 3)
        assert diff_ops(f, 2, 1, 1) == (3, 2, 2, 3)

    def test_rejects_empty_table(self):
        import numpy as np

        with pytest.raises(ParameterError):
            TimeSpaceFunction(np.zeros((0, 1, 1)))


class TestSufficientCondition:
    @pytest.mark.parametrize("params", PARAM_GRID)
    def test_martingales_are_certified(self, params):
        for build in (compensated_position, compensated_square):
            f = TimeSpaceFunction.from_callable(build(params), 6, 6, 6)
            report = check_sufficient_condition(f, params)
            assert report.certified
            assert report.worst_interior is None and report.worst_boundary is None

    def test_interior_failure_located(self, symmetric):
        f = TimeSpaceFunction.from_callable(lambda t, x, y: Fraction((y - x) ** 2), 4, 4, 4)
        report = check_sufficient_condition(f, symmetric)
        assert not report.certified
        assert report.interior_residual == 1
        assert report.worst_interior is not None

    def test_boundary_failure_only(self, symmetric):
        """f = y is harmonic in x but moves with the maximum."""
        f = TimeSpaceFunction.from_callable(lambda t, x, y: Fraction(y), 3, 3, 3)
        report = check_sufficient_condition(f, symmetric)
        assert report.interior_residual == 0
        assert report.boundary_residual == Fraction(1, 2)

    def test_float_tables(self, symmetric):
        f = TimeSpaceFunction.from_callable(lambda t, x, y: float(y - x), 5, 5, 5, exact=False)
        report = check_sufficient_condition(f, symmetric)
        assert not report.exact
        assert report.within(1e-14)

    def test_coverage(self, symmetric):
        with pytest.raises(CoverageError, match="interior"):
            check_sufficient_condition(TimeSpaceFunction.from_callable(lambda t, x, y: Fraction(0), 1, 3, 3), symmetric)
        with pytest.raises(CoverageError, match="boundary"):
            check_sufficient_condition(TimeSpaceFunction.from_callable(lambda t, x, y: Fraction(0), 3, 2, 0), symmetric)


class TestExpectationProfile:
    @pytest.mark.parametrize("params", PARAM_GRID)
    def test_martingale_profile_is_flat(self, params):
        f = TimeSpaceFunction.from_callable(compensated_square(params), 8, 8, 8)
        assert expectation_profile(f, params) == [Fraction(0)] * 9

    def test_needs_full_coverage(self, symmetric):
        f = TimeSpaceFunction.from_callable(lambda t, x, y: Fraction(0), 5, 3, 5)
        with pytest.raises(CoverageError):
            expectation_profile(f, symmetric)
