from dataclasses import dataclass
from typing import Any, Sequence

from models.point import INF, is_inf
from models.polynomial import Polynomial


@dataclass(frozen=True)
class RationalMap:
    """f = P/Q on the Riemann sphere.

    The constructor does not look for common roots; use ``from_coefficients``
    (or ``dynamics.validate_map``) for inputs that need the check.
    """
    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self):
        if self.denominator.is_zero():
            raise ValueError("Denominator must not be identically zero")
        if self.degree < 1:
            raise ValueError("Map must have degree at least 1")

    @classmethod
    def polynomial(cls, coefficients: Sequence[Any]) -> "RationalMap":
        return cls(Polynomial(coefficients), Polynomial([1]))

    @classmethod
    def from_coefficients(cls, numerator: Sequence[Any], denominator: Sequence[Any]) -> "RationalMap":
        from dynamics import validate_map
        return validate_map(cls(Polynomial(numerator), Polynomial(denominator)))

    @property
    def degree(self) -> int:
        return max(self.numerator.degree, self.denominator.degree)

    def is_polynomial(self) -> bool:
        return self.denominator.degree == 0

    def as_polynomial(self) -> Polynomial:
        """Normalized P/c for a constant denominator c."""
        if not self.is_polynomial():
            raise ValueError("Map is not a polynomial")
        c = self.denominator.coefficients[0]
        return Polynomial([a / c for a in self.numerator.coefficients])

    def __call__(self, z):
        if is_inf(z):
            p, q = self.numerator, self.denominator
            if p.degree > q.degree:
                return INF
            if p.degree < q.degree:
                return 0 * q.leading
            return p.leading / q.leading
        den = self.denominator(z)
        if den == 0:
            return INF
        return self.numerator(z) / den

    def value_and_derivative(self, z):
        """(f(z), f'(z)) for finite z away from poles."""
        p, dp = self.numerator.eval_with_derivative(z)
        q, dq = self.denominator.eval_with_derivative(z)
        if q == 0:
            return INF, INF
        return p / q, (dp * q - p * dq) / (q * q)

    def derivative(self, z):
        return self.value_and_derivative(z)[1]

    def swapped(self) -> "RationalMap":
        """The conjugate g(w) = 1/f(1/w), which moves infinity to the origin."""
        d = self.degree
        return RationalMap(self.denominator.reversed(d), self.numerator.reversed(d))

    def conjugate_by_translation(self, c) -> "RationalMap":
        """g(z) = f(z + c) - c, which moves c to the origin."""
        shift = Polynomial([c, 1])
        p = self.numerator.compose(shift)
        q = self.denominator.compose(shift)
        return RationalMap(p - q * c, q)

    def compose(self, inner: "RationalMap") -> "RationalMap":
        """self(inner(z)) via homogenization."""
        d = self.degree
        r, s = inner.numerator, inner.denominator
        r_pows = [Polynomial([1])]
        s_pows = [Polynomial([1])]
        for _ in range(d):
            r_pows.append(r_pows[-1] * r)
            s_pows.append(s_pows[-1] * s)
        num = Polynomial([0])
        den = Polynomial([0])
        p = self.numerator.padded(d + 1)
        q = self.denominator.padded(d + 1)
        for k in range(d + 1):
            term = r_pows[k] * s_pows[d - k]
            if p[k] != 0:
                num = num + term * p[k]
            if q[k] != 0:
                den = den + term * q[k]
        return RationalMap(num, den)

    def iterate(self, k: int) -> "RationalMap":
        if k < 1:
            raise ValueError("Iterate count must be at least 1")
        if self.is_polynomial():
            poly = self.as_polynomial()
            result = poly
            for _ in range(k - 1):
                result = poly.compose(result)
            return RationalMap(result, Polynomial([1]))
        result = self
        for _ in range(k - 1):
            result = self.compose(result)
        return result

    def as_complex(self) -> "RationalMap":
        return RationalMap(self.numerator.as_complex(), self.denominator.as_complex())

    def __repr__(self):
        return f"RationalMap({list(self.numerator.coefficients)!r} / {list(self.denominator.coefficients)!r})"
