"""Centered probability measures on the integers with exact atoms, and their file format."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr, TypeAdapter, ValidationError, field_validator

from .errors import (
    CenteringError,
    InputFileError,
    MeasureError,
    MeasureFormatError,
    NormalizationError,
    ParameterError,
)
from .rationals import Rational, format_rational, parse_rational

Atom = Tuple[int, Fraction]


@dataclass(frozen=True)
class CenteredMeasure:
    """A centered probability measure on Z.

    ``kind`` is ``"finite"`` (atoms are the whole measure) or ``"geometric"`` (the
    centered geometric family of parameter ``n``, listed up to the first atom after which
    the remaining mass is below ``truncation_tail``).
    """

    atoms: Tuple[Atom, ...]
    kind: Literal["finite", "geometric"] = "finite"
    n: Optional[int] = None
    truncation_tail: Fraction = Fraction(0)

    @property
    def support(self) -> List[int]:
        return [x for x, _ in self.atoms]

    @property
    def is_parametric(self) -> bool:
        return self.kind != "finite"

    @property
    def geometric_ratio(self) -> Fraction:
        """1 - pi = n / (n + 1) for the geometric kind."""
        if self.n is None:
            raise MeasureError("geometric_ratio is only defined for the geometric kind")
        return Fraction(self.n, self.n + 1)

    def mass(self, x: int) -> Fraction:
        """mu({x}), exact (untruncated for the geometric kind)."""
        if self.kind == "geometric":
            if x < -self.n:
                return Fraction(0)
            return Fraction(1, self.n + 1) * self.geometric_ratio ** (x + self.n)
        return dict(self.atoms).get(x, Fraction(0))

    def tail_mass(self, x: int) -> Fraction:
        """mu({x+1, x+2, ...}), exact (closed form for the geometric kind)."""
        if self.kind == "geometric":
            if x < -self.n:
                return Fraction(1)
            return self.geometric_ratio ** (x + self.n + 1)
        return sum((mass for point, mass in self.atoms if point > x), Fraction(0))

    def in_support(self, x: int) -> bool:
        if self.kind == "geometric":
            return x >= -self.n
        return self.mass(x) > 0

    def total_mass(self) -> Fraction:
        return sum((mass for _, mass in self.atoms), Fraction(0))

    def mean(self) -> Fraction:
        return sum((x * mass for x, mass in self.atoms), Fraction(0))


def _check_atoms(pairs: Sequence[Tuple[int, Rational]]) -> Tuple[Atom, ...]:
    if not pairs:
        raise MeasureFormatError("A measure needs at least one atom")
    seen: Dict[int, Fraction] = {}
    for x, raw_mass in pairs:
        if isinstance(x, bool) or not isinstance(x, int):
            raise MeasureFormatError(f"Atom position must be an integer, got {x!r}")
        mass = parse_rational(raw_mass)
        if x in seen:
            raise MeasureFormatError(f"Duplicate atom at x={x}")
        if mass <= 0:
            raise MeasureFormatError(f"Atom at x={x} has non-positive mass {mass}")
        seen[x] = mass
    return tuple(sorted(seen.items()))


def from_atoms(pairs: Sequence[Tuple[int, Rational]]) -> CenteredMeasure:
    """Validate and build a finite centered measure."""
    atoms = _check_atoms(pairs)
    measure = CenteredMeasure(atoms)
    total = measure.total_mass()
    if total != 1:
        raise NormalizationError(f"Atom masses sum to {total}, not 1")
    mean = measure.mean()
    if mean != 0:
        raise CenteringError(f"Measure has mean {mean}, not 0")
    return measure


def centered_geometric(n: int, truncation_tail: Rational) -> CenteredMeasure:
    """mu({x}) = pi (1 - pi)^(x + n) for x >= -n, pi = 1 / (1 + n).

    Atoms run from -n up to the first x whose remaining tail mass mu({x+1, ...}) is
    strictly below ``truncation_tail``.
    """
    tail = parse_rational(truncation_tail)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    if not 0 < tail < 1:
        raise ParameterError(f"truncation_tail must lie in (0, 1), got {tail}")

    shell = CenteredMeasure((), kind="geometric", n=n, truncation_tail=tail)
    atoms: List[Atom] = []
    x = -n
    while True:
        atoms.append((x, shell.mass(x)))
        if shell.tail_mass(x) < tail:
            break
        x += 1

    measure = CenteredMeasure(tuple(atoms), kind="geometric", n=n, truncation_tail=tail)
    remaining = 1 - measure.total_mass()
    if not 0 <= remaining < tail:
        raise MeasureError(f"Truncated geometric measure leaves mass {remaining}")
    return measure


def uniform_interval_two(n: int) -> CenteredMeasure:
    """Uniform measure on {-2n, -2n + 2, ..., 2n}."""
    if n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    mass = Fraction(1, 2 * n + 1)
    return from_atoms([(x, mass) for x in range(-2 * n, 2 * n + 1, 2)])


class _AtomEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x: StrictInt
    mass: StrictStr

    @field_validator("mass")
    @classmethod
    def _rational_mass(cls, value: str) -> str:
        parse_rational(value)
        return value


class FiniteMeasureFile(BaseModel):
    """``{"kind": "finite", "atoms": [{"x": -2, "mass": "1/5"}, ...]}``"""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["finite"]
    atoms: List[_AtomEntry] = Field(..., min_length=1)


class GeometricMeasureFile(BaseModel):
    """``{"kind": "geometric", "n": 1, "truncation_tail": "1/1048576"}``"""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["geometric"]
    n: StrictInt = Field(..., ge=1)
    truncation_tail: StrictStr

    @field_validator("truncation_tail")
    @classmethod
    def _rational_tail(cls, value: str) -> str:
        parse_rational(value)
        return value


MeasureFile = Annotated[Union[FiniteMeasureFile, GeometricMeasureFile], Field(discriminator="kind")]
_measure_adapter: TypeAdapter = TypeAdapter(MeasureFile)


def _key_lines(text: str, key: str) -> List[int]:
    """Line numbers (1-based) of each occurrence of ``"key":`` in ``text``."""
    pattern = re.compile(rf'"{re.escape(key)}"\s*:')
    return [text.count("\n", 0, match.start()) + 1 for match in pattern.finditer(text)]


def measure_from_payload(payload: Any) -> CenteredMeasure:
    """Build a measure from a decoded measure-file document."""
    document = _measure_adapter.validate_python(payload)
    if isinstance(document, GeometricMeasureFile):
        return centered_geometric(document.n, document.truncation_tail)
    return from_atoms([(atom.x, atom.mass) for atom in document.atoms])


def parse_measure(text: str, source: str = "<measure>") -> CenteredMeasure:
    """Parse measure-file text, reporting problems with line numbers where possible."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFileError(source, f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc

    atom_lines = _key_lines(text, "x")
    try:
        return measure_from_payload(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = first.get("loc", ())
        line = None
        if len(location) >= 3 and location[1] == "atoms" and isinstance(location[2], int):
            index = location[2]
            line = atom_lines[index] if index < len(atom_lines) else None
        path = ".".join(str(part) for part in location)
        raise InputFileError(source, f"{path}: {first.get('msg')}", line) from exc
    except ParameterError as exc:
        raise InputFileError(source, str(exc)) from exc
    except MeasureFormatError as exc:
        match = re.search(r"x=(-?\d+)", str(exc))
        line = None
        if match and isinstance(payload, dict):
            positions = [atom.get("x") for atom in payload.get("atoms", []) if isinstance(atom, dict)]
            hits = [i for i, x in enumerate(positions) if x == int(match.group(1))]
            if hits and hits[-1] < len(atom_lines):
                line = atom_lines[hits[-1]]
        raise InputFileError(source, str(exc), line) from exc


def load_measure(path: Path) -> CenteredMeasure:
    """Load a measure file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise InputFileError(str(path), "file not found") from exc
    return parse_measure(text, str(path))


def dump_measure(measure: CenteredMeasure) -> Dict[str, Any]:
    """The measure-file document for ``measure``."""
    if measure.kind == "geometric":
        return {
            "kind": "geometric",
            "n": measure.n,
            "truncation_tail": format_rational(measure.truncation_tail),
        }
    return {
        "kind": "finite",
        "atoms": [{"x": x, "mass": format_rational(mass)} for x, mass in measure.atoms],
    }


def save_measure(measure: CenteredMeasure, path: Path) -> None:
    Path(path).write_text(json.dumps(dump_measure(measure), indent=2) + "\n", encoding="utf-8")
