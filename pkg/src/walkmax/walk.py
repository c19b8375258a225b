"""Simple random walk with its running maximum: step law, simulation and exact laws."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, TypeVar

import numpy as np

from .config import get_settings
from .errors import OracleTooLargeError, ParameterError
from .rationals import format_rational, parse_rational
from .rng import make_generator

State = Tuple[int, int]
T = TypeVar("T")

_TWO_64 = 2**64


@dataclass(frozen=True)
class WalkParams:
    """Step law of the walk: P(+1) = p, P(-1) = q, P(0) = r, as exact rationals."""

    p: Fraction
    q: Fraction
    r: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for name in ("p", "q", "r"):
            object.__setattr__(self, name, parse_rational(getattr(self, name)))
        if self.p <= 0 or self.q <= 0:
            raise ParameterError(f"p and q must be positive, got p={self.p}, q={self.q}")
        if self.r < 0:
            raise ParameterError(f"r must be nonnegative, got r={self.r}")
        if self.p + self.q + self.r != 1:
            raise ParameterError(
                f"p + q + r must equal 1 exactly, got {self.p + self.q + self.r}"
            )

    @classmethod
    def from_strings(cls, p: str, q: str, r: Optional[str] = None) -> "WalkParams":
        """Build params from rational strings; ``r`` defaults to ``1 - p - q``."""
        p_value = parse_rational(p)
        q_value = parse_rational(q)
        r_value = 1 - p_value - q_value if r is None else parse_rational(r)
        return cls(p_value, q_value, r_value)

    @property
    def regime(self) -> str:
        if self.p > self.q:
            return "p>q"
        if self.p < self.q:
            return "p<q"
        return "p=q"

    @property
    def is_symmetric(self) -> bool:
        return self.p == self.q

    @property
    def ratio(self) -> Fraction:
        """q / p."""
        return self.q / self.p

    def as_strings(self) -> Dict[str, str]:
        return {"p": format_rational(self.p), "q": format_rational(self.q), "r": format_rational(self.r)}

    def step_thresholds(self) -> Tuple[int, int]:
        """Integer thresholds for a uniform 64-bit draw u: +1 iff u < t_up, -1 iff t_up <= u < t_down.

        ``u < ceil(x * 2**64)`` is equivalent to ``u / 2**64 < x`` for integer u, so the
        comparison is exact.
        """
        t_up = -((-self.p * _TWO_64) // 1)
        t_down = -((-(self.p + self.q) * _TWO_64) // 1)
        return int(t_up), int(t_down)


@dataclass(frozen=True)
class PathSample:
    """A walk path: steps xi_1..xi_t, positions Z_0..Z_t and running maxima M_0..M_t."""

    steps: Tuple[int, ...]
    z: Tuple[int, ...]
    m: Tuple[int, ...]

    @classmethod
    def from_steps(cls, steps: Iterable[int]) -> "PathSample":
        steps = tuple(steps)
        z = tuple(itertools.accumulate(steps, initial=0))
        m = tuple(itertools.accumulate(z, max))
        return cls(steps, z, m)

    @property
    def horizon(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class JointDist:
    """Exact law of (Z_t, M_t) at a fixed time t, keyed by (z, m)."""

    t: int
    mass: Mapping[State, Fraction] = field(repr=False)

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ParameterError(f"t must be nonnegative, got {self.t}")
        frozen = MappingProxyType(dict(sorted(self.mass.items())))
        object.__setattr__(self, "mass", frozen)
        total = Fraction(0)
        for (z, m), weight in frozen.items():
            if weight <= 0:
                raise ParameterError(f"Mass at {(z, m)} must be positive, got {weight}")
            if not (max(z, 0) <= m <= self.t and -self.t <= z <= self.t):
                raise ParameterError(f"State {(z, m)} is not reachable at time {self.t}")
            total += weight
        if total != 1:
            raise ParameterError(f"Joint law at t={self.t} sums to {total}, not 1")

    @classmethod
    def point_mass(cls) -> "JointDist":
        return cls(0, {(0, 0): Fraction(1)})

    def states(self) -> List[State]:
        return list(self.mass)

    def expectation(self, fn: Callable[[int, int], T]) -> T:
        """E[fn(Z_t, M_t)]; exact when ``fn`` returns rationals."""
        return expected_value(self, fn)

    def probability(self, predicate: Callable[[int, int], bool]) -> Fraction:
        return sum(
            (weight for (z, m), weight in self.mass.items() if predicate(z, m)), Fraction(0)
        )

    def marginal_max(self) -> Dict[int, Fraction]:
        """Law of M_t."""
        law: Dict[int, Fraction] = defaultdict(Fraction)
        for (_, m), weight in self.mass.items():
            law[m] += weight
        return dict(sorted(law.items()))

    def marginal_position(self) -> Dict[int, Fraction]:
        """Law of Z_t."""
        law: Dict[int, Fraction] = defaultdict(Fraction)
        for (z, _), weight in self.mass.items():
            law[z] += weight
        return dict(sorted(law.items()))


def _below(draws: np.ndarray, threshold: int) -> np.ndarray:
    if threshold >= _TWO_64:
        return np.ones(draws.shape, dtype=bool)
    return draws < np.uint64(threshold)


def sample_steps(params: WalkParams, rng: np.random.Generator, size: int | Tuple[int, ...]) -> np.ndarray:
    """Draw i.i.d. steps with law (p, q, r) using exact rational thresholds."""
    t_up, t_down = params.step_thresholds()
    draws = rng.integers(0, _TWO_64 - 1, size=size, dtype=np.uint64, endpoint=True)
    up = _below(draws, t_up)
    down = _below(draws, t_down) & ~up
    return up.astype(np.int64) - down.astype(np.int64)


def simulate(params: WalkParams, horizon: int, seed: int) -> PathSample:
    """Simulate one path of length ``horizon``; deterministic given ``seed``."""
    if horizon < 0:
        raise ParameterError(f"horizon must be nonnegative, got {horizon}")
    if seed < 0:
        raise ParameterError(f"seed must be nonnegative, got {seed}")
    steps = sample_steps(params, make_generator(seed), horizon)
    z = np.concatenate(([0], np.cumsum(steps)))
    m = np.maximum.accumulate(z)
    return PathSample(tuple(steps.tolist()), tuple(z.tolist()), tuple(m.tolist()))


def evolve(dist: JointDist, params: WalkParams) -> JointDist:
    """One exact step of the Markov pair (Z, M)."""
    nxt: Dict[State, Fraction] = defaultdict(Fraction)
    for (z, m), weight in dist.mass.items():
        nxt[(z + 1, max(m, z + 1))] += weight * params.p
        nxt[(z - 1, m)] += weight * params.q
        if params.r:
            nxt[(z, m)] += weight * params.r
    return JointDist(dist.t + 1, {state: w for state, w in nxt.items() if w})


@lru_cache(maxsize=32)
def joint_dist_sequence(params: WalkParams, t: int) -> Tuple[JointDist, ...]:
    """Exact laws of (Z_s, M_s) for s = 0..t."""
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    laws = [JointDist.point_mass()]
    for _ in range(t):
        laws.append(evolve(laws[-1], params))
    return tuple(laws)


def joint_dist(params: WalkParams, t: int) -> JointDist:
    """Exact law of (Z_t, M_t): t-fold evolve from the point mass at (0, 0)."""
    return joint_dist_sequence(params, t)[-1]


def iter_paths(
    params: WalkParams, t: int, cap: Optional[int] = None
) -> Iterator[Tuple[PathSample, Fraction]]:
    """Yield every step sequence of length ``t`` with its exact probability."""
    cap = get_settings().oracle_cap if cap is None else cap
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    if t > cap:
        raise OracleTooLargeError(f"oracle too large: t={t} exceeds cap {cap}")

    alphabet = (1, -1, 0) if params.r else (1, -1)
    powers = {
        1: [params.p**k for k in range(t + 1)],
        -1: [params.q**k for k in range(t + 1)],
        0: [params.r**k for k in range(t + 1)],
    }
    for steps in itertools.product(alphabet, repeat=t):
        ups = steps.count(1)
        downs = steps.count(-1)
        weight = powers[1][ups] * powers[-1][downs] * powers[0][t - ups - downs]
        yield PathSample.from_steps(steps), weight


def enumerate_paths(
    params: WalkParams, t: int, cap: Optional[int] = None
) -> List[Tuple[PathSample, Fraction]]:
    """All 3^t (2^t when r = 0) paths with exact weights."""
    return list(iter_paths(params, t, cap))


def aggregate_paths(paths: Iterable[Tuple[PathSample, Fraction]], t: int) -> JointDist:
    """Law of (Z_t, M_t) obtained by summing path weights."""
    mass: Dict[State, Fraction] = defaultdict(Fraction)
    for path, weight in paths:
        mass[(path.z[-1], path.m[-1])] += weight
    return JointDist(t, {state: w for state, w in mass.items() if w})


def expected_value(dist: JointDist, fn: Callable[[int, int], T]) -> T:
    """E[fn(Z_t, M_t)] under ``dist``."""
    total = None
    for (z, m), weight in dist.mass.items():
        term = weight * fn(z, m)
        total = term if total is None else total + term
    return total if total is not None else Fraction(0)


def law_rows(dist: JointDist) -> List[Dict[str, object]]:
    """Rows ``{"z", "m", "mass"}`` for reports."""
    return [
        {"z": z, "m": m, "mass": format_rational(weight)} for (z, m), weight in dist.mass.items()
    ]


__all__ = [
    "JointDist",
    "PathSample",
    "State",
    "WalkParams",
    "aggregate_paths",
    "enumerate_paths",
    "evolve",
    "expected_value",
    "iter_paths",
    "joint_dist",
    "joint_dist_sequence",
    "law_rows",
    "sample_steps",
    "simulate",
]
