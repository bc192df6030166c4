from dataclasses import dataclass
from typing import Any, Sequence, Tuple


def _is_zero(c) -> bool:
    return c == 0


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with coefficients stored lowest degree first.

    Coefficients may be complex, Fraction, QuadraticSurd or mpmath numbers;
    only ring operations are used, so exact inputs stay exact.
    """
    coefficients: Tuple[Any, ...]

    def __init__(self, coefficients: Sequence[Any]):
        coeffs = list(coefficients)
        while len(coeffs) > 1 and _is_zero(coeffs[-1]):
            coeffs.pop()
        if not coeffs:
            coeffs = [0]
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def monomial(cls, k: int, c: Any = 1) -> "Polynomial":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> Any:
        return self.coefficients[-1]

    def is_zero(self) -> bool:
        return len(self.coefficients) == 1 and _is_zero(self.coefficients[0])

    def __call__(self, z):
        acc = 0 * z
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def eval_with_derivative(self, z):
        """Horner evaluation returning (p(z), p'(z))."""
        p = 0 * z
        dp = 0 * z
        for c in reversed(self.coefficients):
            dp = dp * z + p
            p = p * z + c
        return p, dp

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial([0])
        return Polynomial([k * c for k, c in enumerate(self.coefficients)][1:])

    def padded(self, length: int) -> Tuple[Any, ...]:
        return self.coefficients + (0,) * (length - len(self.coefficients))

    def reversed(self, d: int) -> "Polynomial":
        """Coefficients of w^d p(1/w)."""
        return Polynomial(list(reversed(self.padded(d + 1))))

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        n = max(len(self.coefficients), len(other.coefficients))
        a, b = self.padded(n), other.padded(n)
        return Polynomial([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coefficients])

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial([c * other for c in self.coefficients])
        out = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.coefficients):
                out[i + j] = out[i + j] + a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Polynomial([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def compose(self, other: "Polynomial") -> "Polynomial":
        """p(other(z)) by Horner on polynomials."""
        acc = Polynomial([0])
        for c in reversed(self.coefficients):
            acc = acc * other + c
        return acc

    def shift(self, c) -> "Polynomial":
        """p(z + c)."""
        return self.compose(Polynomial([c, 1]))

    def as_complex(self) -> "Polynomial":
        return Polynomial([complex(c) for c in self.coefficients])

    def __repr__(self):
        return f"Polynomial({list(self.coefficients)!r})"
