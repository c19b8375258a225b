"""Parsing and formatting of exact rationals as "numerator/denominator" strings."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

from .errors import ParameterError

RATIONAL_PATTERN = re.compile(r"^-?\d+(/\d+)?$")

Rational = Union[int, Fraction]


def parse_rational(raw: str | int | Fraction) -> Fraction:
    """Return the exact rational denoted by ``raw``.

    Strings must match ``-?\\d+(/\\d+)?`` with a nonzero denominator; binary floats are
    never accepted.
    """
    if isinstance(raw, bool):
        raise ParameterError(f"Expected a rational, got boolean {raw!r}")
    if isinstance(raw, (int, Fraction)):
        return Fraction(raw)
    if not isinstance(raw, str):
        raise ParameterError(f"Expected a rational string, got {type(raw).__name__}")

    text = raw.strip()
    if not RATIONAL_PATTERN.match(text):
        raise ParameterError(f"Invalid rational '{raw}'. Expected format NUM or NUM/DEN")
    if "/" in text:
        numerator, denominator = text.split("/", maxsplit=1)
        if int(denominator) == 0:
            raise ParameterError(f"Invalid rational '{raw}': zero denominator")
        return Fraction(int(numerator), int(denominator))
    return Fraction(int(text))


def format_rational(value: Rational) -> str:
    """Format an exact rational as ``"num/den"`` (or ``"num"`` for integers)."""
    return str(Fraction(value))
