import cmath
import enum
from typing import Union


class Infinity(enum.Enum):
    """The point at infinity of the Riemann sphere."""
    INF = "inf"

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"


INF = Infinity.INF

ComplexValue = Union[complex, Infinity]


def is_inf(z) -> bool:
    return z is INF


def to_complex(z) -> complex:
    """Coerce exact or arbitrary-precision numbers to a Python complex."""
    if isinstance(z, complex):
        return z
    if isinstance(z, (int, float)):
        return complex(z)
    return complex(z)


def distance(z, w) -> float:
    """Euclidean distance for finite points, 0 between two infinities."""
    if is_inf(z) or is_inf(w):
        return 0.0 if (is_inf(z) and is_inf(w)) else float("inf")
    return abs(to_complex(z) - to_complex(w))


def unit(z: complex) -> complex:
    return z / abs(z)


def phase(z: complex) -> float:
    return cmath.phase(z)
