from dataclasses import dataclass
from typing import Any, Sequence, Tuple


@dataclass(frozen=True)
class PowerSeries:
    """Truncated power series c_0 + c_1 z + ... + c_N z^N.

    ``order`` is the highest retained power; coefficients past it are
    unknown, not zero, so every binary operation truncates to the lower order.
    """
    coefficients: Tuple[Any, ...]

    def __init__(self, coefficients: Sequence[Any]):
        if len(coefficients) == 0:
            raise ValueError("Power series needs at least one coefficient")
        object.__setattr__(self, "coefficients", tuple(coefficients))

    @classmethod
    def variable(cls, order: int, one: Any = 1) -> "PowerSeries":
        return cls([0 * one, one] + [0 * one] * (order - 1))

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, k: int):
        return self.coefficients[k]

    def __len__(self):
        return len(self.coefficients)

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise ValueError(f"Cannot extend series of order {self.order} to {order}")
        return PowerSeries(self.coefficients[: order + 1])

    def _pair(self, other):
        if not isinstance(other, PowerSeries):
            other = PowerSeries([other] + [0] * self.order)
        n = min(self.order, other.order)
        return self.coefficients[: n + 1], other.coefficients[: n + 1]

    def __add__(self, other):
        a, b = self._pair(other)
        return PowerSeries([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries([-c for c in self.coefficients])

    def __sub__(self, other):
        a, b = self._pair(other)
        return PowerSeries([x - y for x, y in zip(a, b)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries([c * other for c in self.coefficients])
        a, b = self._pair(other)
        n = len(a)
        out = []
        for k in range(n):
            acc = 0 * a[0]
            for i in range(k + 1):
                if a[i] != 0 and b[k - i] != 0:
                    acc = acc + a[i] * b[k - i]
            out.append(acc)
        return PowerSeries(out)

    __rmul__ = __mul__

    def inverse(self) -> "PowerSeries":
        """1/s by the triangular recurrence; needs c_0 != 0."""
        c = self.coefficients
        if c[0] == 0:
            raise ZeroDivisionError("Series with zero constant term has no inverse")
        out = [1 / c[0]]
        for k in range(1, len(c)):
            acc = 0 * out[0]
            for i in range(1, k + 1):
                if c[i] != 0:
                    acc = acc + c[i] * out[k - i]
            out.append(-acc / c[0])
        return PowerSeries(out)

    def __truediv__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries([c / other for c in self.coefficients])
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = PowerSeries([1 + 0 * self.coefficients[0]] + [0] * self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        """self(inner(z)); inner must have zero constant term."""
        if inner.coefficients[0] != 0:
            raise ValueError("Inner series must vanish at the origin")
        n = min(self.order, inner.order)
        inner = inner.truncate(n)
        acc = PowerSeries([self.coefficients[n]] + [0] * n)
        for c in reversed(self.coefficients[:n]):
            acc = acc * inner + c
        return acc

    def derivative(self) -> "PowerSeries":
        c = self.coefficients
        if len(c) == 1:
            return PowerSeries([0 * c[0]])
        return PowerSeries([k * c[k] for k in range(1, len(c))])

    def __call__(self, z):
        acc = 0 * z
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def valuation(self, tol: float = 0.0) -> int:
        """Index of the first coefficient with modulus above tol, or -1."""
        for k, c in enumerate(self.coefficients):
            if (c != 0) if tol == 0 else abs(complex(c)) > tol:
                return k
        return -1
