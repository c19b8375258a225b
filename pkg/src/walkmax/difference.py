"""Time-space functions f(t, x, y), their first differences and the sufficient martingale condition.

``x`` plays the role of the drawdown M - Z and ``y`` the running maximum M.  If

    (p+q)/2 Dx+Dx- f - (p-q)(Dx+ + Dx-)/2 f + Dt- f = 0      t >= 2, x >= 1
    p Dy+ f(t,0,y) + q Dx+ f(t,0,y) + Dt- f(t,0,y) = 0        t >= 1, x = 0

then f(t, M_t - Z_t, M_t) is a martingale.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .errors import CoverageError, DomainError, ParameterError
from .walk import WalkParams, joint_dist_sequence

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]
GridPoint = Tuple[int, int, int]


@dataclass(frozen=True)
class TimeSpaceFunction:
    """A fully populated table f(t, x, y) on 0..T x 0..X x 0..Y.

    Exact tables hold ``Fraction`` entries (numpy object array); inexact ones float64.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 3 or min(self.values.shape) < 1:
            raise ParameterError(f"Expected a nonempty 3-d table, got shape {self.values.shape}")
        if self.values.dtype == object and any(v is None for v in self.values.flat):
            raise ParameterError("Table has unpopulated entries")
        self.values.setflags(write=False)

    @classmethod
    def from_callable(
        cls, fn: Callable[[int, int, int], Number], t_max: int, x_max: int, y_max: int, exact: bool = True
    ) -> "TimeSpaceFunction":
        shape = (t_max + 1, x_max + 1, y_max + 1)
        table = np.empty(shape, dtype=object if exact else np.float64)
        for t, x, y in np.ndindex(*shape):
            table[t, x, y] = fn(t, x, y)
        return cls(table)

    @property
    def bounds(self) -> GridPoint:
        t, x, y = self.values.shape
        return t - 1, x - 1, y - 1

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    def __call__(self, t: int, x: int, y: int) -> Number:
        t_max, x_max, y_max = self.bounds
        if not (0 <= t <= t_max and 0 <= x <= x_max and 0 <= y <= y_max):
            raise DomainError(f"({t}, {x}, {y}) lies outside the grid {self.bounds}")
        return self.values[t, x, y]


def diff_ops(f: TimeSpaceFunction, t: int, x: int, y: int) -> Tuple[Number, Number, Number, Number]:
    """(Dt- f, Dx+ f, Dx- f, Dy+ f) at (t, x, y)."""
    centre = f(t, x, y)
    return (
        centre - f(t - 1, x, y),
        f(t, x + 1, y) - centre,
        centre - f(t, x - 1, y),
        f(t, x, y + 1) - centre,
    )


def interior_residual(f: TimeSpaceFunction, params: WalkParams, t: int, x: int, y: int) -> Number:
    centre = f(t, x, y)
    dt_minus = centre - f(t - 1, x, y)
    dx_plus = f(t, x + 1, y) - centre
    dx_minus = centre - f(t, x - 1, y)
    p, q = _coefficients(f, params)
    return (p + q) / 2 * (dx_plus - dx_minus) - (p - q) * (dx_plus + dx_minus) / 2 + dt_minus


def boundary_residual(f: TimeSpaceFunction, params: WalkParams, t: int, y: int) -> Number:
    centre = f(t, 0, y)
    p, q = _coefficients(f, params)
    return p * (f(t, 0, y + 1) - centre) + q * (f(t, 1, y) - centre) + (centre - f(t - 1, 0, y))


def _coefficients(f: TimeSpaceFunction, params: WalkParams) -> Tuple[Number, Number]:
    if f.exact:
        return params.p, params.q
    return float(params.p), float(params.q)


def _scale(f: TimeSpaceFunction, points: List[GridPoint]) -> float:
    return max((abs(float(f(*point))) for point in points), default=0.0) or 1.0


@dataclass(frozen=True)
class SufficientConditionReport:
    """Largest residuals of both difference-equation families over the grid."""

    interior_residual: Number
    boundary_residual: Number
    interior_relative: float
    boundary_relative: float
    interior_points: int
    boundary_points: int
    worst_interior: Optional[GridPoint]
    worst_boundary: Optional[GridPoint]
    exact: bool

    @property
    def certified(self) -> bool:
        """Exact zero residual in both families."""
        return self.exact and self.interior_residual == 0 and self.boundary_residual == 0

    def within(self, tolerance: float) -> bool:
        return self.interior_relative <= tolerance and self.boundary_relative <= tolerance


def _worst(evaluations: List[Tuple[GridPoint, Number, float]], zero: Number) -> Tuple[Number, float, Optional[GridPoint]]:
    """Largest absolute residual, its point, and the largest relative residual."""
    point, residual, _ = max(evaluations, key=lambda item: item[1])
    relative = max(item[2] for item in evaluations)
    return residual, relative, (point if residual != zero else None)


def check_sufficient_condition(f: TimeSpaceFunction, params: WalkParams) -> SufficientConditionReport:
    """Evaluate both difference equations at every in-grid point."""
    t_max, x_max, y_max = f.bounds
    interior = [(t, x, y) for t in range(2, t_max + 1) for x in range(1, x_max) for y in range(y_max + 1)]
    boundary = [(t, 0, y) for t in range(1, t_max + 1) for y in range(y_max)] if x_max >= 1 else []

    missing = [name for name, points in (("interior", interior), ("boundary", boundary)) if not points]
    if missing:
        raise CoverageError(f"Grid {f.bounds} leaves equation families untested: {', '.join(missing)}")

    interior_evaluations = []
    for t, x, y in interior:
        residual = abs(interior_residual(f, params, t, x, y))
        scale = _scale(f, [(t, x, y), (t - 1, x, y), (t, x + 1, y), (t, x - 1, y)])
        interior_evaluations.append(((t, x, y), residual, float(residual) / scale))

    boundary_evaluations = []
    for t, _, y in boundary:
        residual = abs(boundary_residual(f, params, t, y))
        scale = _scale(f, [(t, 0, y), (t - 1, 0, y), (t, 1, y), (t, 0, y + 1)])
        boundary_evaluations.append(((t, 0, y), residual, float(residual) / scale))

    zero: Number = Fraction(0) if f.exact else 0.0
    interior_max, interior_relative, worst_interior = _worst(interior_evaluations, zero)
    boundary_max, boundary_relative, worst_boundary = _worst(boundary_evaluations, zero)

    report = SufficientConditionReport(
        interior_residual=interior_max,
        boundary_residual=boundary_max,
        interior_relative=interior_relative,
        boundary_relative=boundary_relative,
        interior_points=len(interior),
        boundary_points=len(boundary),
        worst_interior=worst_interior,
        worst_boundary=worst_boundary,
        exact=f.exact,
    )
    logger.info(
        "Sufficient condition on grid %s: interior=%s boundary=%s",
        f.bounds,
        report.interior_residual,
        report.boundary_residual,
    )
    return report


def expectation_profile(f: TimeSpaceFunction, params: WalkParams) -> List[Number]:
    """E[f(t, M_t - Z_t, M_t)] for t = 0..T using the exact law of (Z_t, M_t)."""
    t_max, x_max, y_max = f.bounds
    if x_max < t_max or y_max < t_max:
        raise CoverageError(
            f"Grid {f.bounds} does not cover every state reachable by t={t_max}; need x, y >= {t_max}"
        )
    laws = joint_dist_sequence(params, t_max)
    return [law.expectation(lambda z, m, t=t: f(t, m - z, m)) for t, law in enumerate(laws)]
