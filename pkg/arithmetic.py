import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

import config
from errors import CertificateError, DomainError, PrecisionError, ScheduleError
from models.rotation import ContinuedFractionExpansion, Enclosure, RotationKind, RotationNumber
from models.surd import QuadraticSurd
from schemas.arithmetic import (
    ConditionName,
    ConditionRecord,
    ConditionReport,
    ExpansionRecord,
    MeasureEstimate,
    Verdict,
)

logger = logging.getLogger(__name__)

LOG2_10 = math.log2(10)
LADDER = (ConditionName.roth, ConditionName.siegel, ConditionName.brjuno, ConditionName.perez_marco)

# Gap values beyond this are only known through their logarithm.
EXACT_GAP_LIMIT = 10 ** 9


def precision_bits(digits: int) -> int:
    return int(math.ceil(digits * LOG2_10))


# ---------------------------------------------------------------------------
# Gap schedules and Liouville numbers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapSchedule:
    """Strictly increasing positive integers g(1) < g(2) < ... defining sum 2^-g(k).

    ``log_value(k)`` is the natural log of g(k) and stays finite for gaps far
    too large to write down; ``exact(k)`` returns None for those.
    """
    label: str
    log_value: Callable[[int], mpmath.mpf] = field(repr=False, compare=False)
    exact_value: Callable[[int], Optional[int]] = field(repr=False, compare=False)

    def exact(self, k: int) -> Optional[int]:
        return self.exact_value(k)

    def exceeds(self, k: int, bound: int) -> bool:
        g = self.exact(k)
        if g is None:
            return True
        return g > bound

    def terms_below(self, bits: int) -> int:
        """Number of terms with g(k) <= bits."""
        k = 1
        while not self.exceeds(k, bits):
            k += 1
        return k - 1

    @classmethod
    def factorial(cls) -> "GapSchedule":
        def exact(k: int) -> Optional[int]:
            if k > 12:
                return None
            return math.factorial(k)
        return cls("sum 2^-n!", lambda k: mpmath.loggamma(k + 1), exact)

    @classmethod
    def geometric(cls, base: int) -> "GapSchedule":
        """g(k) = base^(k-1)."""
        if base < 2:
            raise ScheduleError(f"Geometric schedule needs base >= 2, got {base}")

        def exact(k: int) -> Optional[int]:
            value = base ** (k - 1)
            return value if value <= EXACT_GAP_LIMIT else None
        return cls(f"sum 2^-{base}^(k-1)", lambda k: (k - 1) * mpmath.log(base), exact)

    @classmethod
    def from_prefix(cls, values: Sequence[int], label: Optional[str] = None) -> "GapSchedule":
        """Given leading gaps, continued by g(k+1) = g(k)! so the sum stays irrational."""
        values = [int(v) for v in values]
        if not values or values[0] < 1:
            raise ScheduleError("Schedule must start with a positive integer")
        for a, b in zip(values, values[1:]):
            if b <= a:
                raise ScheduleError(f"Schedule must be strictly increasing, got {a} then {b}")

        n = len(values)

        def log_value(k: int) -> mpmath.mpf:
            if k <= n:
                return mpmath.log(values[k - 1])
            if k == n + 1:
                return mpmath.loggamma(values[-1] + 1)
            return mpmath.inf

        def exact(k: int) -> Optional[int]:
            if k <= n:
                return values[k - 1]
            if k == n + 1 and values[-1] <= 12:
                return math.factorial(values[-1])
            return None
        return cls(label or "sum 2^-(" + ",".join(map(str, values)) + ",...)", log_value, exact)

    @classmethod
    def cremer(cls) -> "GapSchedule":
        return cremer_schedule()


def cremer_schedule() -> GapSchedule:
    """g(1) = 1, g(k+1) = (2^g(k))!."""
    exact_values = [1, 2, 24]

    def exact(k: int) -> Optional[int]:
        return exact_values[k - 1] if k <= len(exact_values) else None

    def log_value(k: int) -> mpmath.mpf:
        if k <= len(exact_values):
            return mpmath.log(exact_values[k - 1])
        if k == len(exact_values) + 1:
            return mpmath.loggamma(mpmath.mpf(2) ** exact_values[-1] + 1)
        return mpmath.inf
    return GapSchedule("cremer tower", log_value, exact)


def _liouville_enclosure(schedule: GapSchedule) -> Callable[[int], Enclosure]:
    def enclose(bits: int) -> Enclosure:
        lo = Fraction(0)
        k = 1
        previous = 0
        while True:
            g = schedule.exact(k)
            if g is None or g >= bits + 1:
                break
            if g <= previous:
                raise ScheduleError(f"Schedule is not increasing at k={k}")
            lo += Fraction(1, 1 << g)
            previous = g
            k += 1
        # Remaining tail is at most 2^(1 - g(k)) <= 2^-bits.
        return lo, lo + Fraction(1, 1 << bits)
    return enclose


def construct_liouville(schedule: Optional[GapSchedule] = None) -> RotationNumber:
    schedule = schedule or GapSchedule.factorial()
    g1 = schedule.exact(1)
    if g1 is None or g1 < 1:
        raise ScheduleError("Schedule must start with a positive integer")
    return RotationNumber(schedule.label, RotationKind.liouville, _liouville_enclosure(schedule),
                          irrational=True, generator=schedule)


def float_truncation(xi: RotationNumber) -> Tuple[float, int]:
    """Double nearest to xi, with the number of gap terms that survive the rounding."""
    value = float(xi)
    schedule = xi.generator if isinstance(xi.generator, GapSchedule) else None
    terms = schedule.terms_below(60) if schedule is not None else 0
    return value, terms


def golden() -> RotationNumber:
    return RotationNumber.from_surd(QuadraticSurd(Fraction(-1, 2), Fraction(1, 2), 5), "golden")


def cube_root_quarter() -> RotationNumber:
    return RotationNumber.from_evaluator(lambda: mpmath.cbrt(mpmath.mpf(1) / 4), "cbrt(1/4)")


def parse_rotation(text: str) -> RotationNumber:
    """Named angle, fraction p/q, decimal literal, or gaps:g1,g2,..."""
    name = text.strip().lower()
    if name in ("golden", "phi"):
        return golden()
    if name in ("cbrt", "cbrt4", "cube-root"):
        return cube_root_quarter()
    if name == "liouville":
        return construct_liouville()
    if name == "cremer":
        return construct_liouville(cremer_schedule())
    if name.startswith("gaps:"):
        values = [int(v) for v in name[5:].split(",") if v]
        return construct_liouville(GapSchedule.from_prefix(values))
    if "/" in name:
        return RotationNumber.from_fraction(Fraction(name))
    try:
        return RotationNumber.from_decimal(name)
    except ValueError:
        raise ValueError(f"Unrecognized rotation number '{text}'")


# ---------------------------------------------------------------------------
# Continued fractions
# ---------------------------------------------------------------------------

def _gauss_quotients(enclosure: Enclosure, depth: int) -> Tuple[List[int], bool]:
    lo, hi = enclosure
    quotients: List[int] = []
    while len(quotients) < depth:
        if lo == hi:
            if lo == 0:
                return quotients, True
            inv = 1 / lo
            a = math.floor(inv)
            quotients.append(a)
            lo = hi = inv - a
            continue
        if lo <= 0:
            break
        a = math.floor(1 / hi)
        if a == 0 or math.floor(1 / lo) != a:
            break
        quotients.append(a)
        lo, hi = 1 / hi - a, 1 / lo - a
    return quotients, False


def _check_unit_interval(xi: RotationNumber):
    lo, hi = xi.enclose(64)
    if hi <= 0 or lo >= 1:
        raise ValueError(f"Rotation number {xi.label} must lie in (0, 1)")


def cf_expand(xi: RotationNumber, depth: int = config.DEFAULT_DEPTH,
              precision: int = config.DEFAULT_PRECISION) -> ContinuedFractionExpansion:
    """Certified partial quotients a_1..a_depth via the interval Gauss map.

    Precision doubles up to ``precision`` decimal digits; if that is not
    enough, PrecisionError carries the deepest certified expansion.
    """
    if depth < 1:
        raise ValueError("Depth must be at least 1")
    _check_unit_interval(xi)
    max_bits = precision_bits(precision)
    bits = min(max_bits, 64 + 8 * depth)
    while True:
        quotients, terminated = _gauss_quotients(xi.enclose(bits), depth)
        if terminated or len(quotients) >= depth:
            return ContinuedFractionExpansion.from_quotients(quotients[:depth], terminated, bits)
        if bits >= max_bits:
            partial = ContinuedFractionExpansion.from_quotients(quotients, False, bits)
            logger.warning(f"Expansion of {xi.label} certified only to depth {len(quotients)} "
                           f"at {precision} digits")
            raise PrecisionError(f"Precision exhausted: certified {len(quotients)} of {depth} "
                                 f"quotients of {xi.label}", depth=len(quotients), partial=partial)
        bits = min(max_bits, 2 * bits)


def expansion_record(xi: RotationNumber, expansion: ContinuedFractionExpansion) -> ExpansionRecord:
    return ExpansionRecord(label=xi.label, depth=expansion.depth, terminated=expansion.terminated,
                           certified_bits=expansion.certified_bits,
                           quotients=list(expansion.quotients), denominators=list(expansion.q))


def gauss_shift(xi: RotationNumber) -> RotationNumber:
    """1/xi mod 1, as a new enclosure-answering angle."""
    _check_unit_interval(xi)
    if not xi.irrational:
        inv = 1 / xi.exact
        value = inv - math.floor(inv)
        if value == 0:
            raise DomainError(f"Gauss shift of {xi.label} is 0")
        return RotationNumber.from_fraction(value, label=f"shift({xi.label})")

    lo0, _ = xi.enclose(64)
    extra = 2 * max(1, math.ceil(-math.log2(float(lo0)))) + 4 if lo0 > 0 else 16

    def enclose(bits: int) -> Enclosure:
        for attempt in range(6):
            lo, hi = xi.enclose(bits + extra + 8 * attempt)
            if lo <= 0:
                continue
            a = math.floor(1 / hi)
            if math.floor(1 / lo) == a:
                return 1 / hi - a, 1 / lo - a
        raise PrecisionError(f"Cannot separate the first quotient of {xi.label}")
    return RotationNumber(f"shift({xi.label})", xi.kind, enclose, irrational=True, generator=xi.generator)


# ---------------------------------------------------------------------------
# Small divisors
# ---------------------------------------------------------------------------

def _distance_to_integer(xi: RotationNumber, q: int, bits: int) -> Tuple[Fraction, Fraction]:
    lo, hi = xi.enclose(bits)
    x_lo, x_hi = q * lo, q * hi
    p = round((x_lo + x_hi) / 2)
    r_lo, r_hi = x_lo - p, x_hi - p
    if r_lo <= 0 <= r_hi:
        return Fraction(0), max(-r_lo, r_hi)
    return min(abs(r_lo), abs(r_hi)), max(abs(r_lo), abs(r_hi))


def multiplier_error(xi: RotationNumber, n: int,
                     expansion: Optional[ContinuedFractionExpansion] = None,
                     precision: int = config.DEFAULT_PRECISION) -> float:
    """|lambda^{q_n} - 1| = 2 sin(pi ||q_n xi||), checked against 2/q_{n+1} and 2*pi/q_{n+1}."""
    if n < 0:
        raise ValueError("Index must be non-negative")
    if expansion is None or expansion.depth < n + 1:
        expansion = cf_expand(xi, n + 1, precision)
    if expansion.depth < n + 1:
        raise DomainError(f"Expansion of {xi.label} terminates at depth {expansion.depth}; "
                          f"the angle is rational")
    q_n, q_next = expansion.q[n], expansion.q[n + 1]
    bits = q_n.bit_length() + q_next.bit_length() + 64
    lo, hi = _distance_to_integer(xi, q_n, bits)
    if lo == 0:
        raise PrecisionError(f"Cannot separate {q_n}*{xi.label} from an integer", depth=n)
    with mpmath.workdps(30):
        delta = mpmath.mpf(lo.numerator) / lo.denominator
        value = float(2 * mpmath.sin(mpmath.pi * delta))
    if q_next > q_n and not (2.0 / q_next <= value * (1 + 1e-12) and value <= 2 * math.pi / q_next):
        raise CertificateError(f"Multiplier error {value:.3e} outside [2/q, 2pi/q] for q={q_next}")
    logger.debug(f"|lambda^{q_n} - 1| = {value:.6e} for {xi.label}")
    return value


def best_approximation_check(xi: RotationNumber, max_q: int = config.BEST_APPROXIMATION_MAX_Q,
                             expansion: Optional[ContinuedFractionExpansion] = None,
                             precision: int = config.DEFAULT_PRECISION) -> List[int]:
    """Indices n with q_n <= max_q where some k < q_n comes closer to an integer.

    An empty list means every convergent denominator up to max_q is a best
    approximation.
    """
    if expansion is None:
        try:
            expansion = cf_expand(xi, 4 * int(math.log2(max_q)) + 8, precision)
        except PrecisionError as e:
            expansion = e.partial
    bits = 2 * max_q.bit_length() + 96
    lo, _ = xi.enclose(bits)
    scale = 1 << bits
    x = (lo.numerator * scale) // lo.denominator
    # Enclosure error times k stays below this slack.
    slack = 2 * max_q + 2
    targets = {q: n for n, q in enumerate(expansion.q) if 2 <= q <= max_q and n >= 1}
    violations = []
    running = None
    for k in range(1, max_q + 1):
        m = (k * x) % scale
        d = min(m, scale - m)
        if k in targets and running is not None and not running > d + slack:
            violations.append(targets[k])
        running = d if running is None else min(running, d)
    if violations:
        logger.warning(f"Best approximation fails for {xi.label} at indices {violations}")
    return violations


def diophantine_constant(xi: RotationNumber, kappa: float, depth: int = config.DEFAULT_DEPTH,
                         expansion: Optional[ContinuedFractionExpansion] = None,
                         precision: int = config.DEFAULT_PRECISION) -> float:
    """min over certified convergents of q^kappa |xi - p/q|."""
    if expansion is None:
        try:
            expansion = cf_expand(xi, depth, precision)
        except PrecisionError as e:
            expansion = e.partial
    best = math.inf
    for n in range(1, expansion.depth + 1):
        p, q = expansion.p[n], expansion.q[n]
        bits = 2 * q.bit_length() + 64
        lo, hi = xi.enclose(bits)
        gap = min(abs(lo - Fraction(p, q)), abs(hi - Fraction(p, q)))
        if gap == 0:
            continue
        with mpmath.workdps(30):
            value = float(mpmath.mpf(q) ** kappa * mpmath.mpf(gap.numerator) / gap.denominator)
        best = min(best, value)
    return best


# ---------------------------------------------------------------------------
# Arithmetic conditions
# ---------------------------------------------------------------------------

def _log_ratios(expansion: ContinuedFractionExpansion) -> List[Tuple[int, float]]:
    """(n, log q_{n+1} / log q_n) over n with q_n >= 2."""
    out = []
    for n in range(1, expansion.depth):
        q, q_next = expansion.q[n], expansion.q[n + 1]
        if q >= 2:
            out.append((n, math.log(q_next) / math.log(q)))
    return out


def _tail(values: List):
    return values[len(values) // 2:]


def _increasing_records(ratios: List[Tuple[int, float]]) -> List[Tuple[int, float]]:
    records: List[Tuple[int, float]] = []
    for n, r in ratios:
        if not records or r > records[-1][1]:
            records.append((n, r))
    return records


def _siegel_failure(ratios: List[Tuple[int, float]]) -> Optional[str]:
    """Three successive records each climbing by 0.5, the last at least 3.5."""
    records = _increasing_records(ratios)
    run = records[:1]
    best: Optional[List[Tuple[int, float]]] = None
    for prev, cur in zip(records, records[1:]):
        if cur[1] - prev[1] >= 0.5:
            run.append(cur)
        else:
            run = [cur]
        if len(run) >= 3 and run[-1][1] >= 3.5:
            best = list(run)
    if best is None:
        return None
    return "records " + ", ".join(f"n={n}:{r:.2f}" for n, r in best)


def _series_verdict(terms: List[Tuple[int, int, float]]) -> Tuple[Verdict, float, Optional[str]]:
    """Verdict for a positive series given (n, q_n, term) triples.

    Divergence is certified only from sustained growth: the tail half holds at
    least SERIES_GROWTH_RUN terms >= 1 at q >= 16, each no smaller than the one
    before. A lone large term says nothing about the tail.
    """
    total = sum(t for _, _, t in terms)
    large = [(n, q, t) for n, q, t in _tail(terms) if t >= 1 and q >= 16]
    if (len(large) >= config.SERIES_GROWTH_RUN
            and all(b[2] >= a[2] for a, b in zip(large, large[1:]))):
        return Verdict.fails, total, "terms " + ", ".join(f"{t:.3g} at q_{n}={q}" for n, q, t in large)
    if terms and terms[-1][2] <= 1e-3:
        return Verdict.holds, total, None
    return Verdict.undecidable, total, None


def _cremer_statistics(xi: RotationNumber, expansion: ContinuedFractionExpansion,
                       precision: int) -> List[Tuple[int, mpmath.mpf]]:
    """(q, log log(1/|lambda^q - 1|) / q) lower bounds.

    Gap generators use the partial sums S_k with q = 2^g(k); anything else
    uses the certified convergents.
    """
    out: List[Tuple[int, mpmath.mpf]] = []
    schedule = xi.generator if isinstance(xi.generator, GapSchedule) else None
    with mpmath.workdps(50):
        if schedule is not None:
            k = 1
            while True:
                g = schedule.exact(k)
                if g is None or g > 64:
                    break
                log_next = schedule.log_value(k + 1)
                if log_next == mpmath.inf:
                    break
                # q * tail <= 2^(g(k) + 1 - g(k+1)), and |lambda^q - 1| <= 2 pi q tail.
                g_next = mpmath.exp(log_next)
                lower = (g_next - g - 1) * mpmath.log(2) - mpmath.log(2 * mpmath.pi)
                if lower > 1:
                    out.append((1 << g, mpmath.log(lower) / mpmath.mpf(2) ** g))
                k += 1
            return out
        for n in range(1, expansion.depth):
            q = expansion.q[n]
            if q < 2 or expansion.q[n + 1] <= q:
                continue
            err = multiplier_error(xi, n, expansion, precision)
            if 0 < err < math.exp(-1):
                out.append((q, mpmath.log(-mpmath.log(err)) / q))
    return out


def _propagate(verdicts: Dict[ConditionName, Verdict]) -> Dict[ConditionName, Verdict]:
    """Ro => Si => Br => PM; failures flow left, holds flow right, failure wins."""
    out = dict(verdicts)
    for i in range(len(LADDER) - 2, -1, -1):
        if out[LADDER[i + 1]] == Verdict.fails:
            out[LADDER[i]] = Verdict.fails
    for i in range(len(LADDER) - 1):
        if out[LADDER[i]] == Verdict.holds and out[LADDER[i + 1]] != Verdict.fails:
            out[LADDER[i + 1]] = Verdict.holds
    return out


def condition_report(xi: RotationNumber, depth: int = config.DEFAULT_DEPTH,
                     degrees: Sequence[int] = (2, 3, 10), kappas: Sequence[float] = (2.5, 3.0),
                     precision: int = config.DEFAULT_PRECISION) -> ConditionReport:
    precision_limited = False
    try:
        expansion = cf_expand(xi, depth + 1, precision)
    except PrecisionError as e:
        expansion = e.partial
        precision_limited = True
    achieved = max(0, expansion.depth - 1) if not expansion.terminated else expansion.depth
    ratios = _log_ratios(expansion)
    tail = _tail(ratios)
    tail_max = max((r for _, r in tail), default=None)

    raw: Dict[ConditionName, Verdict] = {}
    stats: Dict[ConditionName, Optional[float]] = {}
    witness: Dict[ConditionName, Optional[str]] = {}

    si_failure = _siegel_failure(ratios)
    stats[ConditionName.siegel] = max((r for _, r in ratios), default=None)
    witness[ConditionName.siegel] = si_failure
    if si_failure:
        raw[ConditionName.siegel] = Verdict.fails
    elif tail_max is not None and tail_max <= 3:
        raw[ConditionName.siegel] = Verdict.holds
    else:
        raw[ConditionName.siegel] = Verdict.undecidable

    stats[ConditionName.roth] = tail_max
    witness[ConditionName.roth] = None
    raw[ConditionName.roth] = (Verdict.holds if tail_max is not None and tail_max <= 1.5
                               else Verdict.undecidable)

    br_terms = []
    pm_terms = []
    for n in range(0, expansion.depth):
        q, q_next = expansion.q[n], expansion.q[n + 1]
        br_terms.append((n, q, math.log(q_next) / q))
        loglog = math.log(math.log(q_next)) if q_next >= 3 else 0.0
        pm_terms.append((n, q, max(0.0, loglog) / q))
    for name, terms in ((ConditionName.brjuno, br_terms), (ConditionName.perez_marco, pm_terms)):
        raw[name], stats[name], witness[name] = _series_verdict(terms)

    verdicts = _propagate(raw)
    records = [ConditionRecord(name=name, depth=achieved, statistic=stats[name],
                               verdict=verdicts[name], witness=witness[name])
               for name in LADDER]

    for kappa in kappas:
        if verdicts[ConditionName.siegel] == Verdict.fails:
            verdict = Verdict.fails
        elif tail_max is not None and tail_max <= kappa - 1:
            verdict = Verdict.holds
        else:
            verdict = Verdict.undecidable
        records.append(ConditionRecord(name=ConditionName.diophantine, parameter=kappa, depth=achieved,
                                       statistic=tail_max, verdict=verdict))

    cremer = _cremer_statistics(xi, expansion, precision)
    best = max(cremer, key=lambda item: item[1], default=None)
    for d in degrees:
        hits = [(q, s) for q, s in cremer if s > mpmath.log(d)]
        if hits:
            q, s = hits[-1]
            records.append(ConditionRecord(name=ConditionName.cremer, parameter=d, depth=achieved,
                                           statistic=float(s), verdict=Verdict.holds,
                                           witness=f"q={q}" if q < 2 ** 64 else f"q=2^{q.bit_length() - 1}"))
        else:
            records.append(ConditionRecord(name=ConditionName.cremer, parameter=d, depth=achieved,
                                           statistic=float(best[1]) if best else None,
                                           verdict=Verdict.undecidable))

    logger.info(f"Conditions for {xi.label} at depth {achieved}: "
                + ", ".join(f"{r.key}={r.verdict.value}" for r in records))
    return ConditionReport(label=xi.label, requested_depth=depth, depth=achieved,
                           terminated=expansion.terminated, precision_limited=precision_limited,
                           records=records)


# ---------------------------------------------------------------------------
# Measure of well-approximable angles
# ---------------------------------------------------------------------------

def measure_experiment(kappa: float, epsilon: float, trials: int = 10 ** 5, seed: int = 0,
                       q_max: int = 1000) -> MeasureEstimate:
    """Monte-Carlo estimate of |{x : |x - p/q| < eps/q^kappa for some q <= q_max}|."""
    if epsilon <= 0:
        raise ValueError("Epsilon must be positive")
    if trials < 1 or q_max < 1:
        raise ValueError("Trials and q_max must be positive")
    rng = np.random.default_rng(seed)
    x = rng.random(trials)
    hit = np.zeros(trials, dtype=bool)
    for q in range(1, q_max + 1):
        qx = q * x
        hit |= np.abs(qx - np.rint(qx)) < epsilon * q ** (1.0 - kappa)
    p = float(hit.mean())
    sigma = math.sqrt(max(p * (1 - p), 1.0 / trials) / trials)
    if kappa > 2:
        bound = float(2 * epsilon * mpmath.zeta(kappa - 1))
        tail = 2 * epsilon * q_max ** (2.0 - kappa) / (kappa - 2)
        within = p <= bound + 3 * sigma
    else:
        bound, tail, within = None, None, None
        logger.info(f"Measure bound is infinite for kappa={kappa}")
    return MeasureEstimate(kappa=kappa, epsilon=epsilon, trials=trials, q_max=q_max, estimate=p,
                           sigma=sigma, bound=bound, bound_finite=kappa > 2, tail_bound=tail,
                           within_bound=within)
