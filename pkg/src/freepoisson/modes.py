"""Dual-mode arithmetic helpers.

Every numeric sequence in the toolkit carries a mode: "exact" values are
`fractions.Fraction` (ints are promoted), "float" values are IEEE doubles.
Exact mode is the test oracle; float mode is for simulation-scale work.
"""
from __future__ import annotations

from fractions import Fraction

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

Number = object  # Fraction | float | int, depending on mode


def is_exact_value(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def infer_mode(values) -> str:
    """Exact if every value is an int or Fraction, float otherwise."""
    return EXACT if all(is_exact_value(v) for v in values) else FLOAT


def coerce(x, mode: str):
    """Coerce one number into the representation demanded by `mode`."""
    if mode == EXACT:
        if isinstance(x, str):
            return Fraction(x)
        if not is_exact_value(x):
            raise ValueError(f"exact mode requires int or Fraction values, got {x!r}")
        return Fraction(x)
    if mode == FLOAT:
        return float(x)
    raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def coerce_all(values, mode: str) -> tuple:
    return tuple(coerce(v, mode) for v in values)


def zero(mode: str):
    return Fraction(0) if mode == EXACT else 0.0


def one(mode: str):
    return Fraction(1) if mode == EXACT else 1.0


def encode_number(x):
    """JSON form: exact rationals as strings, floats as IEEE doubles."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return str(Fraction(x))
    return float(x)


def decode_number(v, field: str = "value"):
    """Inverse of encode_number; `field` names the location in diagnostics."""
    from .errors import SchemaError

    if isinstance(v, bool):
        raise SchemaError(f"{field}: expected a number, got a boolean")
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"{field}: not a valid rational string: {v!r}") from exc
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    raise SchemaError(f"{field}: expected a number or 'p/q' string, got {type(v).__name__}")
