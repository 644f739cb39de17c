"""Scalar helpers shared across the package.

Weights are exact `Fraction`s whenever the input data is rational; any
operation that has to go through exp/log (only the multiplicative cochain
solver) switches to IEEE doubles.  Helpers here keep that split honest:
`ksum` is exact on rationals and correctly rounded (hence order-independent)
on floats, which is what lets several invariance sweeps compare float
results for exact equality.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

Scalar = Union[int, Fraction, float]

ONE = Fraction(1)
ZERO = Fraction(0)


class GcorrError(Exception):
    """Base class for structured errors raised by this package."""


def is_exact(x: Scalar) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def all_exact(values: Iterable[Scalar]) -> bool:
    return all(is_exact(v) for v in values)


def ksum(values: Iterable[Scalar]) -> Scalar:
    """Sum a collection of weights.

    Exact for rational inputs.  For float inputs uses `math.fsum`, whose
    result is the correctly rounded true sum and therefore independent of
    summation order.
    """
    vals = list(values)
    if all_exact(vals):
        return sum(vals, ZERO)
    return math.fsum(float(v) for v in vals)


def csum(values: Iterable[complex]) -> complex:
    """Order-independent complex sum (fsum on real and imaginary parts)."""
    vals = [complex(v) for v in values]
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def adev(a: Scalar, b: Scalar) -> float:
    """Absolute deviation |a - b| as a float (exact zero stays exact)."""
    if is_exact(a) and is_exact(b):
        return float(abs(Fraction(a) - Fraction(b)))
    return abs(float(a) - float(b))


def rdev(a: Scalar, b: Scalar) -> float:
    """Deviation |a - b| / max(1, |a|, |b|); 0 iff equal on exact inputs."""
    if is_exact(a) and is_exact(b):
        return 0.0 if Fraction(a) == Fraction(b) else float(
            abs(Fraction(a) - Fraction(b)) / max(1, abs(Fraction(a)), abs(Fraction(b)))
        )
    fa, fb = float(a), float(b)
    return abs(fa - fb) / max(1.0, abs(fa), abs(fb))


def cdev(a: complex, b: complex) -> float:
    return abs(complex(a) - complex(b))


def parse_scalar(raw) -> Scalar:
    """Parse a weight from interchange form.

    Strings are exact: "3/4" and "0.75" both become Fraction(3, 4).
    JSON numbers are taken as they come; a float marks the value inexact.
    """
    if isinstance(raw, str):
        return Fraction(raw)
    if isinstance(raw, bool):
        raise ValueError("boolean is not a weight")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        return raw
    raise ValueError(f"cannot parse scalar from {raw!r}")


def format_scalar(x: Scalar):
    """Serialize a weight: exact values as 'p/q' strings, floats as numbers."""
    if is_exact(x):
        f = Fraction(x)
        return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)
    return float(x)
