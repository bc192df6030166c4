import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Tuple

import mpmath

Enclosure = Tuple[Fraction, Fraction]


class RotationKind(str, enum.Enum):
    rational = "rational"
    surd = "surd"
    evaluator = "evaluator"
    liouville = "liouville"


def mpf_enclosure(value: mpmath.mpf, bits: int) -> Enclosure:
    """Fraction interval around an mpmath value computed with bits+16 of precision."""
    man, exp = value.man_exp
    center = Fraction(int(man)) * (Fraction(2) ** int(exp)) if man else Fraction(0)
    pad = Fraction(1, 1 << bits)
    return center - pad, center + pad


@dataclass(frozen=True)
class RotationNumber:
    """Real angle in (0, 1) answering rational enclosure queries at any precision.

    ``enclose(bits)`` returns (lo, hi) with lo <= xi <= hi and hi - lo <= 2^-bits
    (an exact rational returns lo == hi).
    """
    label: str
    kind: RotationKind
    enclose: Callable[[int], Enclosure] = field(repr=False, compare=False)
    irrational: bool = True
    exact: Optional[Fraction] = None
    generator: Optional[Any] = field(default=None, repr=False, compare=False)

    @classmethod
    def from_fraction(cls, value: Fraction, label: Optional[str] = None) -> "RotationNumber":
        value = Fraction(value)
        return cls(label or str(value), RotationKind.rational, lambda bits: (value, value),
                   irrational=False, exact=value)

    @classmethod
    def from_decimal(cls, text: str) -> "RotationNumber":
        """A decimal literal is taken as the exact rational it denotes."""
        return cls.from_fraction(Fraction(text), label=text)

    @classmethod
    def from_surd(cls, surd, label: str) -> "RotationNumber":
        return cls(label, RotationKind.surd, surd.enclosure, generator=surd)

    @classmethod
    def from_evaluator(cls, fn: Callable[[], mpmath.mpf], label: str) -> "RotationNumber":
        """Angle given by an mpmath expression evaluated at the ambient working precision."""
        def enclose(bits: int) -> Enclosure:
            with mpmath.workprec(bits + 16):
                return mpf_enclosure(fn(), bits)
        return cls(label, RotationKind.evaluator, enclose, generator=fn)

    def value(self, dps: int = 30) -> mpmath.mpf:
        bits = int(dps * 3.33) + 8
        lo, hi = self.enclose(bits)
        with mpmath.workdps(dps + 5):
            mid = (lo + hi) / 2
            return mpmath.mpf(mid.numerator) / mid.denominator

    def __float__(self):
        lo, hi = self.enclose(64)
        return float((lo + hi) / 2)

    def multiplier(self, dps: int = 30) -> mpmath.mpc:
        with mpmath.workdps(dps):
            return mpmath.expjpi(2 * self.value(dps))


@dataclass(frozen=True)
class ContinuedFractionExpansion:
    """xi = 1/(a_1 + 1/(a_2 + ...)) with convergents p_n/q_n.

    Index 0 holds p_0/q_0 = 0/1; q_1 = a_1 and so on by the usual recurrence.
    """
    quotients: Tuple[int, ...]
    p: Tuple[int, ...]
    q: Tuple[int, ...]
    terminated: bool = False
    certified_bits: int = 0

    @classmethod
    def from_quotients(cls, quotients, terminated: bool = False, certified_bits: int = 0):
        # seeded with (p_0, q_0) and (p_-1, q_-1)
        ps, qs = [0], [1]
        prev_p, prev_q = 1, 0
        cur_p, cur_q = 0, 1
        for a in quotients:
            cur_p, prev_p = a * cur_p + prev_p, cur_p
            cur_q, prev_q = a * cur_q + prev_q, cur_q
            ps.append(cur_p)
            qs.append(cur_q)
        return cls(tuple(quotients), tuple(ps), tuple(qs), terminated, certified_bits)

    @property
    def depth(self) -> int:
        return len(self.quotients)

    def convergent(self, n: int) -> Fraction:
        return Fraction(self.p[n], self.q[n])
