import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class QuadraticSurd:
    """Exact element a + b*sqrt(D) of Q(sqrt(D)), D a non-square integer.

    D = -1 gives the Gaussian rationals, which is how exact unimodular
    multipliers such as (3+4i)/5 are carried.
    """
    a: Fraction
    b: Fraction
    d: int

    def __init__(self, a: Rational, b: Rational, d: int):
        if d == 0 or d == 1 or (d > 0 and math.isqrt(d) ** 2 == d):
            raise ValueError(f"Radicand {d} must not be a perfect square")
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "d", d)

    @classmethod
    def gaussian(cls, re: Rational, im: Rational) -> "QuadraticSurd":
        return cls(re, im, -1)

    def _lift(self, other) -> "QuadraticSurd":
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                raise ValueError(f"Cannot mix radicands {self.d} and {other.d}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticSurd(other, 0, self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return complex(self) + other
        return QuadraticSurd(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return complex(self) * other
        return QuadraticSurd(self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return complex(self) / other
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("Division by zero surd")
        num = self * o.conjugate()
        return QuadraticSurd(num.a / n, num.b / n, self.d)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return (1 / self) ** (-k)
        result = QuadraticSurd(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadraticSurd):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __complex__(self):
        root = math.sqrt(abs(self.d))
        if self.d < 0:
            return complex(float(self.a), float(self.b) * root)
        return complex(float(self.a) + float(self.b) * root, 0.0)

    def __float__(self):
        if self.d < 0:
            raise TypeError("Imaginary surd has no real value")
        return complex(self).real

    def __abs__(self):
        return abs(complex(self))

    def enclosure(self, bits: int) -> Tuple[Fraction, Fraction]:
        """Rational interval of width at most 2^-bits around a real surd."""
        if self.d < 0:
            raise TypeError("Enclosure needs a real surd")
        # b*sqrt(d) = sign(b) * sqrt(b^2 d); scale so isqrt resolves 2^-bits
        r = self.b * self.b * self.d
        scale = 1 << (bits + 2)
        num, den = r.numerator, r.denominator
        root = math.isqrt(num * den * scale * scale)
        lo = Fraction(root, den * scale)
        hi = Fraction(root + 1, den * scale)
        if self.b < 0:
            lo, hi = -hi, -lo
        return self.a + lo, self.a + hi

    def __repr__(self):
        return f"QuadraticSurd({self.a}, {self.b}, {self.d})"
