"""Exact rational helpers and canonical JSON encoding.

Rationals travel as strings: ``"3"``, ``"-1/2"``.  Everything that is emitted
goes through :func:`dumps` so a parse/re-emit cycle is byte-identical.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Iterable

Rational = Fraction


def to_rational(value: Any) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational string")
        return Fraction(text)
    raise TypeError(f"cannot read {value!r} as an exact rational")


def fmt(q: Fraction | int) -> str:
    return str(Fraction(q))


def fmt_vector(values: Iterable[Fraction | int]) -> list[str]:
    return [fmt(v) for v in values]


def is_integral(q: Fraction | int) -> bool:
    return Fraction(q).denominator == 1


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators, rationals as strings."""
    return json.dumps(_encode(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _encode(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    return obj
