"""Discrete Azema-Yor martingales H(Z_t, M_t) and the function g_{p,q}.

H(Z_t, M_t) is a martingale exactly when, for some boundary function F,

    H(x, y) = F(y) - (F(y+1) - F(y)) g_{p,q}(y - x)

with g_{p,q}(z) = z for p = q and ((q/p)^-z - 1) / (1 - q/p) otherwise.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, StrictStr, ValidationError, field_validator

from .errors import CoverageError, DomainError, InputFileError, ParameterError
from .rationals import format_rational, parse_rational
from .walk import State, WalkParams, joint_dist_sequence

logger = logging.getLogger(__name__)

Value = Union[Fraction, float]
HTable = Union[Mapping[State, Value], Callable[[int, int], Value]]


def g_pq(params: WalkParams, z: Union[int, Fraction, float]) -> Value:
    """z when p = q, ((q/p)^-z - 1) / (1 - q/p) otherwise.

    Exact for integer z (q/p is rational); floating point otherwise.
    """
    if params.is_symmetric:
        return z
    ratio = params.ratio
    if isinstance(z, int) or (isinstance(z, Fraction) and z.denominator == 1):
        return (ratio ** (-int(z)) - 1) / (1 - ratio)
    ratio_f = float(ratio)
    return (ratio_f ** (-float(z)) - 1) / (1 - ratio_f)


@dataclass(frozen=True)
class AzemaYorSpec:
    """Boundary function F on 0..Y_max together with the step law."""

    F: Tuple[Fraction, ...]
    params: WalkParams

    def __post_init__(self) -> None:
        values = tuple(parse_rational(value) for value in self.F)
        if len(values) < 2:
            raise ParameterError("F needs at least two entries (Y_max >= 1)")
        object.__setattr__(self, "F", values)

    @property
    def y_max(self) -> int:
        return len(self.F) - 1


def azema_yor_H(spec: AzemaYorSpec, x: int, y: int) -> Fraction:
    """H(x, y) = F(y) - (F(y+1) - F(y)) g_{p,q}(y - x)."""
    if not max(x, 0) <= y <= spec.y_max - 1:
        raise DomainError(f"(x={x}, y={y}) outside max(x, 0) <= y <= {spec.y_max - 1}")
    increment = spec.F[y + 1] - spec.F[y]
    return spec.F[y] - increment * g_pq(spec.params, y - x)


@dataclass(frozen=True)
class MartingaleVerdict:
    """Outcome of the one-step conditional-expectation check."""

    passed: bool
    t_max: int
    states_checked: int
    counterexample: Optional[State] = None
    lhs: Optional[Value] = None
    rhs: Optional[Value] = None


def reachable_states(params: WalkParams, t_max: int) -> List[State]:
    """States of (Z, M) reachable at times 0..t_max - 1, in order of first appearance."""
    seen: Dict[State, None] = {}
    for law in joint_dist_sequence(params, max(t_max - 1, 0))[:t_max]:
        for state in law.states():
            seen.setdefault(state, None)
    return list(seen)


def _lookup(table: HTable) -> Callable[[int, int], Value]:
    if callable(table):
        return table

    def lookup(x: int, y: int) -> Value:
        try:
            return table[(x, y)]
        except KeyError as exc:
            raise DomainError(f"H is not defined at (x={x}, y={y})") from exc

    return lookup


def verify_martingale_table(table: HTable, params: WalkParams, t_max: int) -> MartingaleVerdict:
    """Check H(x,y) = E[H(Z_{t+1}, M_{t+1}) | (Z_t, M_t) = (x,y)] exactly at reachable states.

    x = y:  H(x,y) = p H(x+1, y+1) + q H(x-1, y) + r H(x, y)
    x < y:  H(x,y) = p H(x+1, y)   + q H(x-1, y) + r H(x, y)
    """
    if t_max < 1:
        raise ParameterError(f"t_max must be at least 1, got {t_max}")
    H = _lookup(table)
    states = reachable_states(params, t_max)
    for x, y in states:
        up = H(x + 1, y + 1) if x == y else H(x + 1, y)
        lhs = H(x, y)
        rhs = params.p * up + params.q * H(x - 1, y) + params.r * lhs
        if lhs != rhs:
            logger.info("Martingale check failed at (x=%s, y=%s): %s != %s", x, y, lhs, rhs)
            return MartingaleVerdict(False, t_max, len(states), (x, y), lhs, rhs)
    logger.info("Martingale check passed on %s states up to t=%s", len(states), t_max)
    return MartingaleVerdict(True, t_max, len(states))


def verify_martingale_H(spec: AzemaYorSpec, t_max: int) -> MartingaleVerdict:
    """Exact martingale verdict for the H characterized by ``spec``."""
    if spec.y_max < t_max + 1:
        raise CoverageError(
            f"F is defined on 0..{spec.y_max}; checking up to t={t_max} needs Y_max >= {t_max + 1}"
        )
    return verify_martingale_table(lambda x, y: azema_yor_H(spec, x, y), spec.params, t_max)


def martingale_table(spec: AzemaYorSpec, t_max: int) -> Dict[State, Fraction]:
    """H at every state a verification up to ``t_max`` touches."""
    table: Dict[State, Fraction] = {}
    for x, y in reachable_states(spec.params, t_max):
        for state in ((x, y), (x + 1, max(x + 1, y)), (x - 1, y)):
            table[state] = azema_yor_H(spec, *state)
    return table


def reconstruct_spec(table: HTable, params: WalkParams, y_max: int) -> AzemaYorSpec:
    """Recover F from a martingale table: F(y) = H(y, y) below the top and
    F(y_max) = F(y_max - 1) + (q/p)(H(y_max - 1, y_max - 1) - H(y_max - 2, y_max - 1)).
    """
    if y_max < 1:
        raise ParameterError(f"y_max must be at least 1, got {y_max}")
    H = _lookup(table)
    F = [H(y, y) for y in range(y_max)]
    top = y_max - 1
    F.append(F[top] + params.ratio * (H(top, top) - H(top - 1, top)))
    return AzemaYorSpec(tuple(F), params)


class WalkParamsModel(BaseModel):
    """``{"p": "1/2", "q": "1/2", "r": "0"}``"""

    model_config = ConfigDict(extra="forbid")

    p: StrictStr
    q: StrictStr
    r: StrictStr = "0"

    @field_validator("p", "q", "r")
    @classmethod
    def _rational(cls, value: str) -> str:
        parse_rational(value)
        return value

    def to_params(self) -> WalkParams:
        return WalkParams.from_strings(self.p, self.q, self.r)


class AzemaYorSpecFile(BaseModel):
    """``{"params": {...}, "F": ["0", "0", "1", ...]}`` with F indexed from y = 0."""

    model_config = ConfigDict(extra="forbid")

    params: WalkParamsModel
    F: List[StrictStr] = Field(..., min_length=2)

    @field_validator("F")
    @classmethod
    def _rationals(cls, values: List[str]) -> List[str]:
        for value in values:
            parse_rational(value)
        return values


def parse_spec(text: str, source: str = "<spec>") -> AzemaYorSpec:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFileError(source, f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    try:
        document = AzemaYorSpecFile.model_validate(payload)
        return AzemaYorSpec(tuple(document.F), document.params.to_params())
    except ValidationError as exc:
        first = exc.errors()[0]
        path = ".".join(str(part) for part in first.get("loc", ()))
        raise InputFileError(source, f"{path}: {first.get('msg')}") from exc
    except ParameterError as exc:
        raise InputFileError(source, str(exc)) from exc


def load_spec(path: Path) -> AzemaYorSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise InputFileError(str(path), "file not found") from exc
    return parse_spec(text, str(path))


def dump_spec(spec: AzemaYorSpec) -> Dict[str, Any]:
    return {"params": spec.params.as_strings(), "F": [format_rational(value) for value in spec.F]}


def save_spec(spec: AzemaYorSpec, path: Path) -> None:
    Path(path).write_text(json.dumps(dump_spec(spec), indent=2) + "\n", encoding="utf-8")
