from fractions import Fraction

import pytest

from walkmax.config import get_settings
from walkmax.walk import WalkParams

PARAM_GRID = [
    WalkParams(Fraction(1, 2), Fraction(1, 2), Fraction(0)),
    WalkParams(Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
    WalkParams(Fraction(2, 3), Fraction(1, 3), Fraction(0)),
    WalkParams(Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)),
    WalkParams(Fraction(3, 5), Fraction(1, 5), Fraction(1, 5)),
]

SUBMARTINGALE_GRID = [params for params in PARAM_GRID if params.p >= params.q] + [
    WalkParams(Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)),
]


@pytest.fixture(autouse=True)
def _fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def symmetric() -> WalkParams:
    return WalkParams.from_strings("1/2", "1/2", "0")


@pytest.fixture
def lazy_symmetric() -> WalkParams:
    return WalkParams.from_strings("1/4", "1/4", "1/2")


@pytest.fixture
def upward() -> WalkParams:
    return WalkParams.from_strings("2/3", "1/3", "0")
