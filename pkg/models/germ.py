from dataclasses import dataclass
from typing import Any, Sequence, Tuple

from errors import DomainError
from models.power_series import PowerSeries


@dataclass(frozen=True)
class GermSeries:
    """Germ f(z) = a_1 z + a_2 z^2 + ... + a_N z^N at a fixed point moved to 0."""
    coefficients: Tuple[Any, ...]

    def __init__(self, coefficients: Sequence[Any]):
        if len(coefficients) == 0:
            raise ValueError("Germ needs at least the multiplier")
        object.__setattr__(self, "coefficients", tuple(coefficients))

    @classmethod
    def from_power_series(cls, series: PowerSeries) -> "GermSeries":
        if series[0] != 0 and abs(complex(series[0])) > 1e-12:
            raise ValueError("Series does not fix the origin")
        return cls(series.coefficients[1:])

    @property
    def order(self) -> int:
        return len(self.coefficients)

    @property
    def multiplier(self):
        return self.coefficients[0]

    def coefficient(self, k: int):
        """a_k for 1 <= k <= N; higher coefficients are unknown."""
        if k < 1 or k > self.order:
            raise DomainError(f"Coefficient a_{k} is beyond truncation order {self.order}")
        return self.coefficients[k - 1]

    def as_power_series(self) -> PowerSeries:
        return PowerSeries([0 * self.coefficients[0]] + list(self.coefficients))

    def compose(self, inner: "GermSeries") -> "GermSeries":
        return GermSeries.from_power_series(self.as_power_series().compose(inner.as_power_series()))

    def iterate(self, k: int) -> "GermSeries":
        """Germ of the k-fold iterate, truncated to the same order."""
        result = self
        for _ in range(k - 1):
            result = self.compose(result)
        return result

    def __call__(self, z):
        return self.as_power_series()(z)
