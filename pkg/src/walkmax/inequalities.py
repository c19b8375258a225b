"""Doob's maximal and L^pi inequalities for the walk, computed from exact joint laws."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Union

from .azema_yor import g_pq
from .config import get_settings
from .errors import ParameterError, RegimeError
from .rationals import format_rational
from .walk import WalkParams, joint_dist

logger = logging.getLogger(__name__)

Real = Union[int, Fraction, float]

ALLOWED_RELATIONS = {"p>q": {"<=", "="}, "p<q": {">=", "="}, "p=q": {"="}}


def _relation(lhs: Real, rhs: Real) -> str:
    if lhs == rhs:
        return "="
    return "<=" if lhs < rhs else ">="


@dataclass(frozen=True)
class DoobReport:
    """ceil(lambda) P(M_t >= lambda) against E[1{M_t >= lambda} Z_t]."""

    t: int
    lam: Real
    ceil_lambda: int
    prob: Fraction
    lhs: Fraction
    rhs: Fraction
    relation: str
    regime: str

    @property
    def chain_holds(self) -> bool:
        """lambda P <= ceil(lambda) P, the trivial first link."""
        return self.lam * self.prob <= self.lhs

    @property
    def holds(self) -> bool:
        return self.chain_holds and self.relation in ALLOWED_RELATIONS[self.regime]

    def to_row(self) -> dict:
        lam = format_rational(self.lam) if not isinstance(self.lam, float) else repr(self.lam)
        return {
            "t": self.t,
            "lambda": lam,
            "ceil_lambda": self.ceil_lambda,
            "prob": format_rational(self.prob),
            "lhs": format_rational(self.lhs),
            "rhs": format_rational(self.rhs),
            "relation": self.relation,
            "regime": self.regime,
        }


def doob_maximal(params: WalkParams, t: int, lam: Real) -> DoobReport:
    """Both sides of the maximal inequality at (t, lambda), exactly."""
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    level = math.ceil(lam)
    law = joint_dist(params, t)
    prob = law.probability(lambda z, m: m >= level)
    lhs = level * prob
    rhs = law.expectation(lambda z, m: Fraction(z) if m >= level else Fraction(0))
    report = DoobReport(t, lam, level, prob, lhs, rhs, _relation(lhs, rhs), params.regime)
    if not report.holds:
        logger.warning("Maximal inequality fails at t=%s lambda=%s: %s", t, lam, report.to_row())
    return report


def default_lambdas(t: int) -> List[Fraction]:
    """1/2, 1, 3/2, ..., t."""
    return [Fraction(k, 2) for k in range(1, 2 * t + 1)]


def doob_sweep(params: WalkParams, t_max: int, lambdas: Optional[Iterable[Real]] = None) -> List[DoobReport]:
    """Reports for every t <= t_max and every lambda (default: half-integers up to t)."""
    chosen = None if lambdas is None else list(lambdas)
    reports = []
    for t in range(t_max + 1):
        for lam in chosen if chosen is not None else default_lambdas(t):
            reports.append(doob_maximal(params, t, lam))
    return reports


def maximal_martingale_mean(params: WalkParams, t: int, lam: Real) -> Fraction:
    """E[U_t] for U = 1{M >= c}(M - c) - 1{M >= c} g_{p,q}(M - Z), c = ceil(lambda); zero."""
    level = math.ceil(lam)

    def u(z: int, m: int) -> Fraction:
        if m < level:
            return Fraction(0)
        return Fraction(m - level) - g_pq(params, m - z)

    return joint_dist(params, t).expectation(u)


def _is_integral(value: Real) -> bool:
    return isinstance(value, int) or (isinstance(value, Fraction) and value.denominator == 1)


@dataclass(frozen=True)
class LpReport:
    """E[M_t^pi] against (pi / (pi - 1))^pi E[|Z_t|^pi]."""

    t: int
    pi: Real
    lhs: Real
    rhs: Real
    exact: bool
    tolerance: float
    intermediate: Optional[Fraction] = None

    @property
    def holds(self) -> bool:
        if self.exact:
            lp_ok = self.lhs <= self.rhs
        else:
            lp_ok = self.lhs <= self.rhs * (1 + self.tolerance)
        return lp_ok and (self.intermediate is None or self.intermediate >= 0)


def lp_boundary(pi: Real, y: int) -> Real:
    """F(y) = sum_{k < y} pi k^(pi - 1); bounded above by y^pi."""
    if _is_integral(pi):
        power = int(pi)
        return sum((power * Fraction(k) ** (power - 1) for k in range(y)), Fraction(0))
    exponent = float(pi)
    return sum(exponent * float(k) ** (exponent - 1) for k in range(y))


def lp_intermediate(params: WalkParams, t: int, pi: int) -> Fraction:
    """(1 - pi) E[M^pi] + pi E[M^(pi-1) Z], nonnegative when p >= q."""
    if not _is_integral(pi) or pi < 2:
        raise ParameterError(f"The intermediate quantity is exact only for integer pi >= 2, got {pi}")
    power = int(pi)
    law = joint_dist(params, t)
    return law.expectation(lambda z, m: (1 - power) * Fraction(m) ** power + power * Fraction(m) ** (power - 1) * z)


def doob_lp(params: WalkParams, t: int, pi: Real, tolerance: Optional[float] = None) -> LpReport:
    """Both sides of Doob's L^pi inequality; exact rationals for integer pi."""
    if params.p < params.q:
        raise RegimeError(f"Doob's L^pi inequality needs p >= q, got p={params.p}, q={params.q}")
    if pi <= 1:
        raise ParameterError(f"pi must exceed 1, got {pi}")
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    tolerance = get_settings().fractional_moment_tolerance if tolerance is None else tolerance
    law = joint_dist(params, t)

    if _is_integral(pi):
        power = int(pi)
        lhs = law.expectation(lambda z, m: Fraction(m) ** power)
        moment = law.expectation(lambda z, m: Fraction(abs(z)) ** power)
        rhs = (Fraction(power, power - 1) ** power) * moment
        report = LpReport(t, pi, lhs, rhs, True, tolerance, lp_intermediate(params, t, power))
    else:
        exponent = float(pi)
        lhs = float(law.expectation(lambda z, m: float(m) ** exponent))
        moment = float(law.expectation(lambda z, m: float(abs(z)) ** exponent))
        rhs = (exponent / (exponent - 1)) ** exponent * moment
        report = LpReport(t, pi, lhs, rhs, False, tolerance)

    if not report.holds:
        logger.warning("L^pi inequality fails at t=%s pi=%s: %s > %s", t, pi, report.lhs, report.rhs)
    return report
