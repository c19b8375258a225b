"""Kennedy martingale a^M b^t h(M - Z) and the generating function of (Z_tau, tau).

tau is the first time the drawdown M - Z reaches n.  The roots alpha_+ and alpha_-
of q a^2 + (r - 1/b) a + p = 0 are irrational in general, so everything downstream of
them is floating point with explicit tolerances.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

from .config import get_settings
from .difference import TimeSpaceFunction
from .errors import ConsistencyError, ParameterError, PoleError, RegimeError
from .rationals import parse_rational
from .walk import WalkParams

logger = logging.getLogger(__name__)

Real = Union[Fraction, float]


def _as_real(value: Union[str, int, Fraction, float]) -> Real:
    if isinstance(value, float):
        return value
    return parse_rational(value)


def discriminant(b: Real, params: WalkParams) -> Real:
    """(r - 1/b)^2 - 4pq, exact when b is rational."""
    c = params.r - 1 / b
    return c * c - 4 * params.p * params.q


@dataclass(frozen=True)
class KennedyParams:
    """Validated Kennedy parameters with the roots alpha_+- and the table h(0..x_max)."""

    a: Real
    b: Real
    n: int
    params: WalkParams
    alpha_plus: float
    alpha_minus: float
    h: Tuple[float, ...]
    tolerance: float

    @property
    def x_max(self) -> int:
        return len(self.h) - 1

    def h_value(self, x: int) -> float:
        """(a - 1/alpha_-) alpha_+^x - (a - 1/alpha_+) alpha_-^x."""
        a = float(self.a)
        return (a - 1 / self.alpha_minus) * self.alpha_plus**x - (a - 1 / self.alpha_plus) * self.alpha_minus**x

    def value(self, t: int, x: int, y: int) -> float:
        """f(t, x, y) = a^y b^t h(x)."""
        return float(self.a) ** y * float(self.b) ** t * self.h_value(x)


def _roots(b: Real, params: WalkParams) -> Tuple[float, float]:
    c = float(params.r - 1 / b)
    root = math.sqrt(float(discriminant(b, params)))
    product = float(params.p / params.q)
    two_q = 2 * float(params.q)
    # take the root free of cancellation and recover the other from the product p/q
    if -c >= 0:
        alpha_plus = (-c + root) / two_q
        alpha_minus = product / alpha_plus
    else:
        alpha_minus = (-c - root) / two_q
        alpha_plus = product / alpha_minus
    return alpha_plus, alpha_minus


def _relative(residual: float, *terms: float) -> float:
    scale = max((abs(term) for term in terms), default=0.0)
    return abs(residual) / scale if scale else abs(residual)


def kennedy_build(
    a: Union[str, int, Fraction, float],
    b: Union[str, int, Fraction, float],
    n: int,
    params: WalkParams,
    x_max: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> KennedyParams:
    """Compute alpha_+-, fill h, and check the recurrence and initial condition."""
    a = _as_real(a)
    b = _as_real(b)
    tolerance = get_settings().kennedy_tolerance if tolerance is None else tolerance
    if a == 0 or b == 0:
        raise ParameterError(f"a and b must be nonzero, got a={a}, b={b}")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    if discriminant(b, params) <= 0:
        raise RegimeError(
            f"(r - 1/b)^2 - 4pq = {discriminant(b, params)} is not positive; "
            "the boundary |r - 1/b| = sqrt(4pq) is rejected"
        )

    alpha_plus, alpha_minus = _roots(b, params)
    x_max = max(n, 12) if x_max is None else x_max
    shell = KennedyParams(a, b, n, params, alpha_plus, alpha_minus, (), tolerance)
    h = tuple(shell.h_value(x) for x in range(x_max + 1))
    kp = KennedyParams(a, b, n, params, alpha_plus, alpha_minus, h, tolerance)

    p, q, r = float(params.p), float(params.q), float(params.r)
    c = r - float(1 / b)
    checks = {
        "vieta-product": _relative(q * alpha_plus * alpha_minus - p, q * alpha_plus * alpha_minus, p),
        "vieta-sum": _relative(alpha_plus + alpha_minus + c / q, alpha_plus, alpha_minus, c / q),
        "h0": _relative(h[0] - (1 / alpha_plus - 1 / alpha_minus), h[0], 1 / alpha_plus, 1 / alpha_minus),
    }
    if x_max >= 1:
        factor = (float(1 / b) - r - p * float(a)) / q
        checks["initial-value"] = _relative(h[1] - factor * h[0], h[1], factor * h[0], h[0])
    for x in range(1, x_max):
        terms = (q * h[x + 1], c * h[x], p * h[x - 1])
        checks[f"recurrence@{x}"] = _relative(sum(terms), *terms)

    failed = {name: value for name, value in checks.items() if value > tolerance}
    if failed:
        raise ConsistencyError(f"Kennedy construction residuals above {tolerance}: {failed}")
    logger.info("Kennedy roots alpha+=%s alpha-=%s for b=%s", alpha_plus, alpha_minus, b)
    return kp


def kennedy_function(kp: KennedyParams, t_max: int, x_max: int, y_max: int) -> TimeSpaceFunction:
    """The table f(t, x, y) = a^y b^t h(x) on the given grid."""
    return TimeSpaceFunction.from_callable(kp.value, t_max, x_max, y_max, exact=False)


def kennedy_pgf(kp: KennedyParams) -> float:
    """E[a^Z_tau b^tau] = (1/alpha_+ - 1/alpha_-) a^-n / h(n)."""
    a = float(kp.a)
    upper = (a - 1 / kp.alpha_minus) * kp.alpha_plus**kp.n
    lower = (a - 1 / kp.alpha_plus) * kp.alpha_minus**kp.n
    denominator = upper - lower
    if abs(denominator) <= kp.tolerance * max(abs(upper), abs(lower), 1e-300):
        raise PoleError(f"Generating function has a pole at a={kp.a}, b={kp.b}, n={kp.n}")
    return (1 / kp.alpha_plus - 1 / kp.alpha_minus) * a ** (-kp.n) / denominator


def kennedy_pole(b: Union[str, int, Fraction, float], n: int, params: WalkParams) -> float:
    """The value of a at which the generating-function denominator vanishes."""
    alpha_plus, alpha_minus = _roots(_as_real(b), params)
    spread = alpha_plus**n - alpha_minus**n
    if spread == 0:
        raise RegimeError(f"No finite pole in a for b={b}, n={n}")
    return (alpha_plus**n / alpha_minus - alpha_minus**n / alpha_plus) / spread


@dataclass(frozen=True)
class PgfComparison:
    closed_form: float
    oracle: float
    horizon: int
    tail_bound: float
    tolerance: float

    @property
    def difference(self) -> float:
        return abs(self.closed_form - self.oracle)

    @property
    def conclusive(self) -> bool:
        """False when the truncated oracle has no finite tail bound (|b| max(|a|, 1/|a|) >= 1)."""
        return math.isfinite(self.tail_bound)

    @property
    def passed(self) -> bool:
        if not self.conclusive:
            return False
        return self.difference <= self.tail_bound + self.tolerance * max(1.0, abs(self.closed_form))


def kennedy_pgf_oracle(kp: KennedyParams, horizon: int = 200) -> Tuple[float, float]:
    """E[a^Z_tau b^tau 1{tau <= horizon}] by DP on the drawdown chain, with its tail bound.

    The drawdown x = M - Z is reflected at 0: from 0 an up-step keeps x = 0 and raises M,
    from x >= 1 it lowers x.  Mass is absorbed when x reaches n, where Z = M - n.
    Since |Z_t| <= t, the mass left after ``horizon`` steps contributes at most
    sum_{t > horizon} (|b| max(|a|, 1/|a|))^t.
    """
    if horizon < 0:
        raise ParameterError(f"horizon must be nonnegative, got {horizon}")
    a, b = float(kp.a), float(kp.b)
    p, q, r = float(kp.params.p), float(kp.params.q), float(kp.params.r)

    states: Dict[Tuple[int, int], float] = {(0, 0): 1.0}
    value = 0.0
    for _ in range(horizon):
        nxt: Dict[Tuple[int, int], float] = defaultdict(float)
        for (x, m), weight in states.items():
            weight *= b
            if x == 0:
                nxt[(0, m + 1)] += p * weight
            else:
                nxt[(x - 1, m)] += p * weight
            nxt[(x + 1, m)] += q * weight
            if r:
                nxt[(x, m)] += r * weight
        states = {}
        for (x, m), weight in nxt.items():
            if x == kp.n:
                value += weight * a ** (m - kp.n)
            else:
                states[(x, m)] = weight

    rho = abs(b) * max(abs(a), 1 / abs(a))
    tail = rho ** (horizon + 1) / (1 - rho) if rho < 1 else math.inf
    return value, tail


def compare_pgf(kp: KennedyParams, horizon: int = 200) -> PgfComparison:
    """Closed form against the truncated DP oracle."""
    oracle, tail = kennedy_pgf_oracle(kp, horizon)
    comparison = PgfComparison(kennedy_pgf(kp), oracle, horizon, tail, kp.tolerance)
    if not comparison.conclusive:
        logger.warning("Oracle tail is unbounded for a=%s, b=%s; generating function left unchecked", kp.a, kp.b)
    return comparison
