"""Discrete Azema-Yor solution of the Skorokhod embedding problem for the symmetric walk.

For a centered measure mu on Z,

    psi(x) = x + mu({x+1, x+2, ...}) / mu({x})      x in supp mu

and T = inf{t : M_t = psi(Z_t)} embeds mu when psi maps the support into the
nonnegative integers (A1) and is strictly increasing there (A2).
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import numpy as np
import sympy

from .azema_yor import g_pq
from .config import Settings, get_settings
from .errors import AssumptionError, ConsistencyError, ParameterError, RegimeError
from .measures import CenteredMeasure, dump_measure, measure_from_payload
from .rng import make_generator, spawn_seeds
from .walk import State, WalkParams, joint_dist, sample_steps

logger = logging.getLogger(__name__)

Value = Union[Fraction, float]


@dataclass(frozen=True)
class EmbeddingPlan:
    """psi on the (listed) support x_0 < x_1 < ... of a measure, with C = psi(x_0) - x_0."""

    measure: CenteredMeasure
    support: Tuple[int, ...]
    psi: Tuple[int, ...]
    C: int

    @property
    def max_level(self) -> int:
        """Index of the top atom; psi(x_K) = x_K = K for a finite measure."""
        return len(self.support) - 1

    def psi_of(self, x: int) -> Optional[int]:
        """psi(x) on the support, ``None`` off it."""
        if self.measure.is_parametric:
            if not self.measure.in_support(x):
                return None
            value = x + self.measure.tail_mass(x) / self.measure.mass(x)
            return int(value)
        try:
            return self.psi[self.support.index(x)]
        except ValueError:
            return None

    def stops(self, z: int, m: int) -> bool:
        level = self.psi_of(z)
        return level is not None and level == m

    def stop_mask(self, z: np.ndarray, m: np.ndarray) -> np.ndarray:
        """Vectorised ``stops``."""
        if self.measure.is_parametric:
            # psi(x) - x is constant on the geometric family
            return (z >= self.support[0]) & (m == z + self.C)
        xs = np.asarray(self.support, dtype=np.int64)
        levels = np.asarray(self.psi, dtype=np.int64)
        index = np.clip(np.searchsorted(xs, z), 0, len(xs) - 1)
        return (xs[index] == z) & (levels[index] == m)


def build_plan(mu: CenteredMeasure) -> EmbeddingPlan:
    """Compute psi on the support and check (A1), (A2) and psi(x_i) = i."""
    support: List[int] = []
    psi: List[int] = []
    for i, (x, mass) in enumerate(mu.atoms):
        value = x + mu.tail_mass(x) / mass
        if value.denominator != 1 or value < 0:
            raise AssumptionError(f"(A1) fails at atom x={x}: psi(x) = {value} is not a nonnegative integer")
        if psi and value <= psi[-1]:
            raise AssumptionError(
                f"(A2) fails between atoms x={support[-1]} and x={x}: psi = {psi[-1]} then {value}"
            )
        support.append(x)
        psi.append(int(value))

    for i, (x, value) in enumerate(zip(support, psi)):
        if value != i:
            raise ConsistencyError(f"psi(x_{i}) = psi({x}) = {value}, expected {i}")
    gaps = [value - x for x, value in zip(support, psi)]
    if any(later > earlier for earlier, later in zip(gaps, gaps[1:])):
        raise ConsistencyError(f"psi(x) - x is not nonincreasing on the support: {gaps}")
    if mu.is_parametric and len(set(gaps)) != 1:
        raise ConsistencyError(f"psi(x) - x is not constant on the geometric family: {gaps}")

    plan = EmbeddingPlan(mu, tuple(support), tuple(psi), psi[0] - support[0])
    logger.info("Embedding plan over %s atoms with C=%s", len(support), plan.C)
    return plan


@dataclass(frozen=True)
class StoppedLaw:
    """Law of Z_T and E[T]; exact rationals or Monte Carlo estimates with standard errors."""

    mode: Literal["exact", "monte-carlo"]
    atoms: Mapping[int, Value]
    expected_T: Value
    stderr: Mapping[int, float] = field(default_factory=dict)
    expected_T_stderr: Optional[float] = None
    n_runs: int = 0
    n_capped: int = 0
    truncation_budget: Fraction = Fraction(0)
    methods: Tuple[str, ...] = ()
    residual_mass: Optional[Fraction] = None
    warnings: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", MappingProxyType(dict(sorted(self.atoms.items()))))
        object.__setattr__(self, "stderr", MappingProxyType(dict(sorted(self.stderr.items()))))

    def probability(self, x: int) -> Value:
        return self.atoms.get(x, 0)

    def tail(self, x: int) -> Value:
        """P(Z_T > x)."""
        return sum((p for y, p in self.atoms.items() if y > x), Fraction(0) if self.mode == "exact" else 0.0)


def _require_symmetric(params: WalkParams) -> None:
    if not params.is_symmetric:
        raise RegimeError(f"The embedding needs p = q, got p={params.p}, q={params.q}")


def _require_finite(plan: EmbeddingPlan) -> None:
    if plan.measure.is_parametric:
        raise ParameterError("Exact stopped laws need a finite measure; use Monte Carlo for the geometric kind")


Target = Tuple[str, int]


def transient_chain(plan: EmbeddingPlan, params: WalkParams) -> Tuple[List[State], Dict[State, List[Tuple[Target, Fraction]]]]:
    """Transient states of (Z, M) before T and their one-step transitions.

    With the maximum at level m < K the walk lives in (x_m, m]: it cannot pass below
    x_m without stopping there, and reaching level K means sitting on x_K = K.
    Targets are ("transient", index) or ("absorbed", x).
    """
    _require_finite(plan)
    states = [(z, m) for m in range(plan.max_level) for z in range(plan.support[m] + 1, m + 1)]
    if plan.stops(0, 0):
        return [], {}
    index = {state: i for i, state in enumerate(states)}

    def target(z: int, m: int) -> Target:
        if plan.stops(z, m):
            return ("absorbed", z)
        if (z, m) not in index:
            raise ConsistencyError(f"State {(z, m)} escapes the transient state space")
        return ("transient", index[(z, m)])

    moves: Dict[State, List[Tuple[Target, Fraction]]] = {}
    for z, m in states:
        options = [(target(z + 1, max(m, z + 1)), params.p), (target(z - 1, m), params.q)]
        if params.r:
            options.append((("transient", index[(z, m)]), params.r))
        moves[(z, m)] = options
    return states, moves


@dataclass(frozen=True)
class ExactSolution:
    atoms: Dict[int, Fraction]
    expected_T: Fraction
    method: str


def fundamental_law(plan: EmbeddingPlan, params: WalkParams) -> ExactSolution:
    """Absorption law and E[T] from (I - Q) B = R and (I - Q) tau = 1, in exact arithmetic."""
    _require_symmetric(params)
    states, moves = transient_chain(plan, params)
    if not states:
        return ExactSolution({0: Fraction(1)}, Fraction(0), "fundamental-matrix")

    columns = {x: j for j, x in enumerate(plan.support)}
    size = len(states)
    system = sympy.eye(size)
    rhs = sympy.zeros(size, len(columns) + 1)
    for i, state in enumerate(states):
        rhs[i, len(columns)] = 1
        for (kind, where), prob in moves[state]:
            weight = sympy.Rational(prob.numerator, prob.denominator)
            if kind == "transient":
                system[i, where] -= weight
            else:
                rhs[i, columns[where]] += weight

    solution = system.LUsolve(rhs)
    start = states.index((0, 0))
    to_fraction = lambda value: Fraction(int(value.p), int(value.q))  # noqa: E731
    atoms = {x: to_fraction(solution[start, j]) for x, j in columns.items()}
    return ExactSolution(
        {x: p for x, p in atoms.items() if p}, to_fraction(solution[start, len(columns)]), "fundamental-matrix"
    )


def ladder_law(plan: EmbeddingPlan, params: WalkParams) -> ExactSolution:
    """Absorption law and E[T] level by level over the running maximum.

    Once the maximum reaches m (with Z = m) the walk is a lazy symmetric walk on
    [x_m, m+1] until it stops at x_m or makes a new maximum: it stops with probability
    1 / (m + 1 - x_m) after (m - x_m) / (p + q) steps on average.
    """
    _require_symmetric(params)
    _require_finite(plan)
    atoms: Dict[int, Fraction] = defaultdict(Fraction)
    expected = Fraction(0)
    reach = Fraction(1)
    for level, x in enumerate(plan.support):
        if x == level:
            atoms[x] += reach
            break
        width = level + 1 - x
        atoms[x] += reach / width
        expected += reach * (level - x) / (params.p + params.q)
        reach *= Fraction(width - 1, width)
    return ExactSolution(dict(atoms), expected, "ladder")


@dataclass(frozen=True)
class PropagationResult:
    absorbed: Dict[int, Fraction]
    residual: Fraction
    expected_T_lower: Fraction
    steps: int
    threshold: Fraction

    @property
    def conserved(self) -> bool:
        return sum(self.absorbed.values(), Fraction(0)) + self.residual == 1

    @property
    def converged(self) -> bool:
        """Transient mass fell below the threshold before the step limit."""
        return self.residual < self.threshold

    @property
    def certified(self) -> bool:
        return self.conserved and self.converged


def propagate_law(plan: EmbeddingPlan, params: WalkParams, bits: int = 64, max_steps: int = 1_000_000) -> PropagationResult:
    """Push exact mass through the chain until the transient mass is below 2^-bits."""
    threshold = Fraction(1, 2**bits)
    states, moves = transient_chain(plan, params)
    if not states:
        return PropagationResult({0: Fraction(1)}, Fraction(0), Fraction(0), 0, threshold)

    current: Dict[int, Fraction] = {states.index((0, 0)): Fraction(1)}
    absorbed: Dict[int, Fraction] = defaultdict(Fraction)
    expected = Fraction(0)
    remaining = Fraction(1)
    steps = 0
    while remaining >= threshold and steps < max_steps:
        expected += remaining
        nxt: Dict[int, Fraction] = defaultdict(Fraction)
        for i, weight in current.items():
            for (kind, where), prob in moves[states[i]]:
                if kind == "transient":
                    nxt[where] += weight * prob
                else:
                    absorbed[where] += weight * prob
        current = {i: w for i, w in nxt.items() if w}
        remaining = sum(current.values(), Fraction(0))
        steps += 1
    if remaining >= threshold:
        logger.warning(
            "Propagation stopped after %s steps with transient mass %.3g above 2^-%s", steps, float(remaining), bits
        )
    return PropagationResult(dict(absorbed), remaining, expected, steps, threshold)


def stopped_law_exact(
    plan: EmbeddingPlan, params: WalkParams, settings: Optional[Settings] = None
) -> StoppedLaw:
    """Exact law of Z_T and E[T], cross-validated by independent methods."""
    settings = settings or get_settings()
    _require_symmetric(params)
    _require_finite(plan)

    ladder = ladder_law(plan, params)
    methods = [ladder.method]
    states, _ = transient_chain(plan, params)
    if len(states) <= settings.fundamental_solve_limit:
        solved = fundamental_law(plan, params)
        if solved.atoms != ladder.atoms or solved.expected_T != ladder.expected_T:
            raise ConsistencyError(
                f"Exact methods disagree: ladder={ladder.atoms}, E[T]={ladder.expected_T}; "
                f"fundamental-matrix={solved.atoms}, E[T]={solved.expected_T}"
            )
        methods.append(solved.method)

    propagated = propagate_law(plan, params, settings.propagation_bits)
    if not propagated.conserved:
        raise ConsistencyError("Propagated absorbed and transient mass do not sum to 1")
    for x, mass in propagated.absorbed.items():
        if not mass <= ladder.atoms.get(x, Fraction(0)) <= mass + propagated.residual:
            raise ConsistencyError(f"Propagation bracket at x={x} excludes the exact mass")
    notes: List[str] = []
    if propagated.converged:
        methods.append("propagation")
    else:
        notes.append(
            f"propagation stopped after {propagated.steps} steps with transient mass "
            f"{float(propagated.residual):.3g}; bracket not certified"
        )

    total = sum(ladder.atoms.values(), Fraction(0))
    if total != 1:
        raise ConsistencyError(f"Total absorbed mass is {total}, not 1")

    unreached = [f"atom x={x} is never reached by the stopping rule" for x in plan.support if not ladder.atoms.get(x)]
    for warning in unreached:
        logger.warning(warning)
    warnings = tuple(notes + unreached)
    return StoppedLaw(
        mode="exact",
        atoms=ladder.atoms,
        expected_T=ladder.expected_T,
        methods=tuple(methods),
        residual_mass=propagated.residual,
        warnings=warnings,
    )


@dataclass(frozen=True)
class BatchResult:
    """Tallies from one Monte Carlo batch."""

    counts: Dict[int, int]
    completed: int
    capped: int
    sum_T: int
    sum_T2: int

    def to_payload(self) -> Dict[str, Any]:
        return {
            "counts": sorted(self.counts.items()),
            "completed": self.completed,
            "capped": self.capped,
            "sum_T": self.sum_T,
            "sum_T2": self.sum_T2,
        }

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "BatchResult":
        return cls(
            {int(x): int(count) for x, count in payload["counts"]},
            payload["completed"],
            payload["capped"],
            payload["sum_T"],
            payload["sum_T2"],
        )


def run_batch(plan: EmbeddingPlan, params: WalkParams, runs: int, seed: np.random.SeedSequence, step_cap: int) -> BatchResult:
    """Run ``runs`` walks in lockstep until each stops or hits ``step_cap``."""
    rng = make_generator(seed)
    z = np.zeros(runs, dtype=np.int64)
    m = np.zeros(runs, dtype=np.int64)
    stop_time = np.zeros(runs, dtype=np.int64)
    active = ~plan.stop_mask(z, m)
    t = 0
    while t < step_cap:
        live = np.flatnonzero(active)
        if live.size == 0:
            break
        z[live] += sample_steps(params, rng, live.size)
        m[live] = np.maximum(m[live], z[live])
        t += 1
        done = live[plan.stop_mask(z[live], m[live])]
        stop_time[done] = t
        active[done] = False

    finished = ~active
    values, counts = np.unique(z[finished], return_counts=True)
    times = stop_time[finished]
    return BatchResult(
        {int(x): int(c) for x, c in zip(values, counts)},
        int(finished.sum()),
        int(active.sum()),
        int(times.sum()),
        int((times * times).sum()),
    )


def batch_payload(
    plan: EmbeddingPlan, params: WalkParams, runs: int, seed: np.random.SeedSequence, step_cap: int
) -> Dict[str, Any]:
    """JSON-serialisable description of one batch."""
    return {
        "measure": dump_measure(plan.measure),
        "params": params.as_strings(),
        "runs": runs,
        "entropy": int(seed.entropy),
        "spawn_key": list(seed.spawn_key),
        "step_cap": step_cap,
    }


def run_batch_payload(payload: Dict[str, Any]) -> Dict[str, Any]:
    """Rebuild a batch from its payload and run it."""
    plan = build_plan(measure_from_payload(payload["measure"]))
    params = WalkParams.from_strings(**payload["params"])
    seed = np.random.SeedSequence(payload["entropy"], spawn_key=tuple(payload["spawn_key"]))
    return run_batch(plan, params, payload["runs"], seed, payload["step_cap"]).to_payload()


def _split(total: int, parts: int) -> List[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts) if base or i < extra]


def _dispatch(payloads: List[Dict[str, Any]], threads: int, settings: Settings) -> List[Dict[str, Any]]:
    if settings.mc_backend == "celery":
        from celery import group

        from .tasks import simulate_embedding_batch

        logger.info("Dispatching %s Monte Carlo batches to Celery", len(payloads))
        job = group(simulate_embedding_batch.s(payload) for payload in payloads)
        return job.apply_async().get()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run_batch_payload, payloads))


def stopped_law_mc(
    plan: EmbeddingPlan,
    params: WalkParams,
    n_runs: int,
    seed: int,
    threads: int = 1,
    step_cap: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> StoppedLaw:
    """Monte Carlo law of Z_T and E[T] with standard errors."""
    settings = settings or get_settings()
    _require_symmetric(params)
    if n_runs < 1:
        raise ParameterError(f"n_runs must be at least 1, got {n_runs}")
    if threads < 1:
        raise ParameterError(f"threads must be at least 1, got {threads}")
    if seed < 0:
        raise ParameterError(f"seed must be nonnegative, got {seed}")
    step_cap = settings.mc_step_cap if step_cap is None else step_cap

    sizes = _split(n_runs, threads)
    seeds = spawn_seeds(seed, len(sizes))
    payloads = [batch_payload(plan, params, size, child, step_cap) for size, child in zip(sizes, seeds)]
    batches = [BatchResult.from_payload(result) for result in _dispatch(payloads, threads, settings)]

    counts: Dict[int, int] = defaultdict(int)
    for batch in batches:
        for x, count in batch.counts.items():
            counts[x] += count
    completed = sum(batch.completed for batch in batches)
    capped = sum(batch.capped for batch in batches)

    warnings: List[str] = []
    if capped / n_runs > settings.capped_fraction_threshold:
        warnings.append(f"{capped} of {n_runs} runs reached the step cap {step_cap}")
    elif capped:
        warnings.append(f"{capped} runs reached the step cap {step_cap}")
    for warning in warnings:
        logger.warning(warning)

    atoms: Dict[int, float] = {}
    stderr: Dict[int, float] = {}
    mean_T = math.nan
    mean_T_stderr = math.nan
    if completed:
        for x, count in counts.items():
            freq = count / completed
            atoms[x] = freq
            stderr[x] = math.sqrt(freq * (1 - freq) / completed)
        mean_T = sum(batch.sum_T for batch in batches) / completed
        second = sum(batch.sum_T2 for batch in batches) / completed
        mean_T_stderr = math.sqrt(max(second - mean_T * mean_T, 0.0) / completed)

    return StoppedLaw(
        mode="monte-carlo",
        atoms=atoms,
        expected_T=mean_T,
        stderr=stderr,
        expected_T_stderr=mean_T_stderr,
        n_runs=completed,
        n_capped=capped,
        truncation_budget=plan.measure.truncation_tail,
        methods=("monte-carlo",),
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class EmbeddingVerdict:
    passed: bool
    failures: Tuple[str, ...]
    atoms_checked: int
    identities_checked: int


def verify_embedding(
    plan: EmbeddingPlan,
    params: WalkParams,
    law: StoppedLaw,
    sigmas: float = 3.0,
    min_mass: Fraction = Fraction(1, 1000),
) -> EmbeddingVerdict:
    """Check Z_T ~ mu and P(Z_T > x) = (psi(x) - x) P(Z_T = x) on the support."""
    _require_symmetric(params)
    mu = plan.measure
    failures: List[str] = []
    atoms_checked = 0
    identities_checked = 0

    if law.mode == "exact":
        for x in sorted(set(plan.support) | set(law.atoms)):
            atoms_checked += 1
            if law.probability(x) != mu.mass(x):
                failures.append(f"atom x={x}: P(Z_T=x)={law.probability(x)} but mu({{x}})={mu.mass(x)}")
        for x, level in zip(plan.support, plan.psi):
            identities_checked += 1
            lhs, rhs = law.tail(x), (level - x) * law.probability(x)
            if lhs != rhs:
                failures.append(f"identity at x={x}: P(Z_T>x)={lhs} but (psi(x)-x)P(Z_T=x)={rhs}")
    else:
        n = max(law.n_runs, 1)
        budget = float(law.truncation_budget)
        for x in sorted(set(plan.support) | set(law.atoms)):
            target = float(mu.mass(x))
            if target == 0:
                atoms_checked += 1
                if law.probability(x):
                    failures.append(f"atom x={x}: observed outside supp mu")
                continue
            if target < min_mass:
                continue
            atoms_checked += 1
            band = sigmas * max(law.stderr.get(x, 0.0), math.sqrt(target * (1 - target) / n)) + budget
            if abs(law.probability(x) - target) > band:
                failures.append(f"atom x={x}: P(Z_T=x)={law.probability(x):.6g} vs mu={target:.6g} (band {band:.3g})")
        for x, level in zip(plan.support, plan.psi):
            if float(mu.mass(x)) < min_mass:
                continue
            identities_checked += 1
            gap = level - x
            above, at = float(law.tail(x)), float(law.probability(x))
            mean = above - gap * at
            observed_var = max(above + gap * gap * at - mean * mean, 0.0)
            target_var = float(mu.tail_mass(x)) + gap * gap * float(mu.mass(x))
            band = sigmas * math.sqrt(max(observed_var, target_var) / n) + budget * (1 + gap)
            if abs(mean) > band:
                failures.append(f"identity at x={x}: P(Z_T>x)-(psi(x)-x)P(Z_T=x)={mean:.6g} (band {band:.3g})")

    for failure in failures:
        logger.info("Embedding check failed: %s", failure)
    return EmbeddingVerdict(not failures, tuple(failures), atoms_checked, identities_checked)


def skorokhod_martingale_mean(plan: EmbeddingPlan, params: WalkParams, x: int, t: int) -> Fraction:
    """E[U_t] for U = 1{M > psi(x)} - 1{M = psi(x)} g_{p,q}(M - Z); zero for every t."""
    level = plan.psi_of(x)
    if level is None:
        raise ParameterError(f"x={x} is not in the support")

    def u(z: int, m: int) -> Fraction:
        if m > level:
            return Fraction(1)
        if m == level:
            return -Fraction(g_pq(params, m - z))
        return Fraction(0)

    return joint_dist(params, t).expectation(u)
