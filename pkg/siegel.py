import cmath
import logging
import math
from contextlib import nullcontext
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

import config
from arithmetic import condition_report
from dynamics import (
    classify_fixed_point,
    cycle_multiplier,
    exact_period,
    periodic_roots,
    rational_rotation,
)
from errors import (
    CertificateError,
    ClassificationError,
    ConvergenceError,
    DegreeOverflowError,
    DomainError,
    DynamicsError,
    NotInBasinError,
)
from linearization import koenigs_chart, koenigs_extend, quadratic_family, solve_linearization
from models.germ import GermSeries
from models.point import INF, is_inf, to_complex
from models.polynomial import Polynomial
from models.power_series import PowerSeries
from models.rational_map import RationalMap
from models.rotation import RotationNumber
from models.surd import QuadraticSurd
from roots import merge_clusters, polynomial_roots
from schemas.arithmetic import ConditionName, Verdict
from schemas.dynamics import CycleReport, CycleSearchLevel, CycleSearchReport, FixedPointClass, FixedPointRecord
from schemas.siegel import (
    Confidence,
    LinearizationReport,
    RadialSample,
    RadiusEstimate,
    ScanVerdict,
    SiegelSizeEstimate,
)

logger = logging.getLogger(__name__)

EXACT_TYPES = (QuadraticSurd, Fraction, int)


def _is_mpmath(value: Any) -> bool:
    return isinstance(value, (mpmath.mpc, mpmath.mpf))


def _abs(value: Any):
    """Modulus in the value's own arithmetic; mpmath stays mpmath so huge values survive."""
    if _is_mpmath(value):
        return abs(value)
    return abs(to_complex(value))


def _log_abs(value: Any) -> Optional[float]:
    if _is_mpmath(value):
        if value == 0:
            return None
        return float(mpmath.log(abs(value)))
    mag = abs(to_complex(value))
    return math.log(mag) if mag > 0 else None


# ---------------------------------------------------------------------------
# Formal linearization

@dataclass(frozen=True)
class FormalLinearization:
    """h(z) = z + h_2 z^2 + ... + h_N z^N solving h(lam z) = f(h(z)) formally.

    ``numerators[n]`` is a_n + X_n and ``divisors[n]`` is lam^n - lam, so
    h_n = numerators[n] / divisors[n]. Lists are indexed from 0.
    """
    multiplier: Any
    h: Tuple[Any, ...] = field(repr=False)
    numerators: Tuple[Any, ...] = field(repr=False)
    divisors: Tuple[Any, ...] = field(repr=False)
    residual: float
    exact: bool
    dps: Optional[int] = None

    @property
    def order(self) -> int:
        return len(self.h) - 1

    def coefficient(self, n: int):
        return self.h[n]

    def transparency(self) -> float:
        """max_n | |h_n| |lam^n - lam| - |a_n + X_n| | / |a_n + X_n|."""
        worst = 0.0
        context = mpmath.workdps(self.dps) if self.dps else nullcontext()
        with context:
            for n in range(2, self.order + 1):
                num = _abs(self.numerators[n])
                if num == 0:
                    continue
                rel = abs(_abs(self.h[n]) * _abs(self.divisors[n]) - num) / num
                worst = max(worst, float(rel))
        return worst

    def report(self) -> LinearizationReport:
        return LinearizationReport(
            multiplier=to_complex(self.multiplier), order=self.order, exact=self.exact,
            coefficients=[to_complex(c) for c in self.h[2:]],
            divisors=[float(_abs(d)) for d in self.divisors[2:]],
            residual=self.residual, transparency=self.transparency())


def _check_resonance(lam: Any, order: int):
    if lam == 0:
        raise DomainError("Multiplier is zero; the germ is superattracting")
    if isinstance(lam, EXACT_TYPES):
        # exact divisors are checked for zero by the recursion itself
        return
    if _is_mpmath(lam):
        eps = mpmath.mpf(2) ** (-mpmath.mp.prec + 20)
        for q in range(1, order + 1):
            if abs(lam ** q - 1) < eps:
                raise DomainError(f"Multiplier is a root of unity of order {q} at working precision")
        return
    lam = complex(lam)
    if abs(lam) < config.SUPERATTRACTING_TOL:
        raise DomainError("Multiplier is zero; the germ is superattracting")
    if abs(abs(lam) - 1) < config.UNIT_CIRCLE_BAND:
        frac, _, err = rational_rotation(lam)
        if err < config.ROOT_OF_UNITY_TOL:
            raise DomainError(f"Multiplier is a root of unity (rotation {frac}); divisor vanishes")


def formal_linearization(germ: GermSeries, order: int, dps: Optional[int] = None) -> FormalLinearization:
    """Exact coefficient matching of h(lam z) = f(h(z)) through z^order.

    Exact multipliers (Gaussian surds, rationals) keep the whole recursion
    exact; mpmath germs run at ``dps`` digits (CREMER_DPS by default).
    """
    if order < 2:
        raise ValueError("Order must be at least 2")
    lam = germ.multiplier
    exact = isinstance(lam, EXACT_TYPES) and all(isinstance(c, EXACT_TYPES) for c in germ.coefficients)
    if _is_mpmath(lam):
        dps = dps or config.CREMER_DPS
    context = mpmath.workdps(dps) if dps else nullcontext()
    with context:
        _check_resonance(lam, order)
        h, numerators, divisors, a = solve_linearization(lam, germ.coefficients[1:order], order)
        residual = _recomposition_residual(a, h, lam, order, exact)
    logger.debug(f"Formal linearization through order {order}: residual {residual:.3e}, exact={exact}")
    return FormalLinearization(lam, tuple(h), tuple(numerators), tuple(divisors), residual, exact, dps)


def _recomposition_residual(a: Sequence[Any], h: Sequence[Any], lam: Any, order: int, exact: bool) -> float:
    """max coefficient of f(h(z)) - h(lam z) through z^order."""
    zero = 0 * lam
    f_series = PowerSeries([zero] + list(a[1: order + 1]))
    h_series = PowerSeries(list(h))
    composed = f_series.compose(h_series)
    worst = 0.0
    lam_pow = zero + 1
    for n in range(1, order + 1):
        lam_pow = lam_pow * lam
        diff = composed[n] - h[n] * lam_pow
        if exact:
            if diff != 0:
                worst = max(worst, abs(to_complex(diff)))
            continue
        scale = max(1, _abs(h[n] * lam_pow))
        worst = max(worst, float(_abs(diff) / scale))
    return worst


def convergence_radius_estimate(lin: FormalLinearization) -> RadiusEstimate:
    """Root test 1/max |h_n|^(1/n) over the tail half, with a slope fit and two half-tail bands."""
    n_max = lin.order
    if n_max < config.RADIUS_MIN_ORDER:
        raise ValueError(f"Radius estimate needs order at least {config.RADIUS_MIN_ORDER}")
    tail = []
    for n in range(n_max // 2, n_max + 1):
        log_mag = _log_abs(lin.h[n])
        if log_mag is not None:
            tail.append((n, log_mag))
    if not tail:
        return RadiusEstimate(order=n_max, radius=math.inf, lower=math.inf, upper=math.inf)
    radii = [math.exp(-log_mag / n) for n, log_mag in tail]
    radius = min(radii)
    half = max(1, len(radii) // 2)
    first, second = min(radii[:half]), min(radii[half:] or radii[:half])
    spread = abs(first - second) / max(first, second)
    slope_radius = None
    if len(tail) >= 2:
        ns = np.array([n for n, _ in tail], dtype=float)
        logs = np.array([v for _, v in tail])
        slope, _ = np.polyfit(ns, logs, 1)
        slope_radius = float(math.exp(-slope)) if slope > -700 else math.inf
    estimates = [radius, first, second] + ([slope_radius] if slope_radius is not None else [])
    confidence = Confidence.low if spread > 0.5 else Confidence.high
    if confidence == Confidence.low:
        logger.warning(f"Radius estimates disagree by {100 * spread:.0f}% at order {n_max}")
    return RadiusEstimate(order=n_max, radius=radius, lower=min(estimates), upper=max(estimates),
                          slope_radius=slope_radius, confidence=confidence)


def cremer_germ(xi: RotationNumber, order: int = 64, dps: int = config.CREMER_DPS) -> GermSeries:
    """lam z + a_2 z^2 + ... with a_n in {0, 1} chosen so |a_n + X_n| >= 1/2."""
    if not xi.irrational:
        raise DomainError(f"Rotation number {xi.label} is rational")
    if order < 2:
        raise ValueError("Order must be at least 2")
    half = mpmath.mpf(1) / 2

    def choose(n: int, x_n) -> int:
        return 0 if abs(x_n) >= half else 1

    with mpmath.workdps(dps):
        lam = xi.multiplier(dps)
        _check_resonance(lam, order)
        _, _, _, a = solve_linearization(lam, [], order, choose)
    ones = sum(1 for c in a[2:] if c == 1)
    logger.info(f"Cremer germ for {xi.label}: {ones} of {order - 1} coefficients set to one")
    return GermSeries([lam] + list(a[2:]))


# ---------------------------------------------------------------------------
# Small cycles

def _normalize(f: RationalMap, record: FixedPointRecord) -> Tuple[RationalMap, Callable[[complex], Any]]:
    """Move the fixed point to 0; rational maps are further conjugated so that g(inf) = 0.

    Returns the normalized map and the map back to original coordinates.
    """
    location = record.location
    if is_inf(location):
        g = f.swapped()
        back = (lambda u: INF if u == 0 else 1 / u)
    else:
        c = to_complex(location)
        g = f.conjugate_by_translation(c) if c != 0 else f
        back = (lambda u, c=c: u + c)
    # the fixed point sits at 0 exactly
    num = g.numerator.coefficients
    g = RationalMap(Polynomial([0 * num[0]] + list(num[1:])), g.denominator)
    if g.is_polynomial():
        return RationalMap(g.as_polynomial(), Polynomial([1])), back
    if g(INF) == 0:
        return g, back
    preimages = [z for z in polynomial_roots(g.numerator) if abs(z) > config.COMMON_ROOT_TOL]
    if not preimages:
        raise DomainError("No nonzero preimage of the fixed point to send to infinity")
    w = preimages[0]
    mobius = RationalMap(Polynomial([0, w]), Polynomial([w, -1]))
    inverse = RationalMap(Polynomial([0, w]), Polynomial([w, 1]))
    normalized = mobius.compose(g.compose(inverse))
    logger.debug(f"Moebius normalization sends preimage {w:.6g} to infinity")
    return normalized, (lambda u, inner=back: inner(inverse(u)))


def product_identity(g: RationalMap, q: int, roots: Optional[List[Any]] = None) -> Tuple[complex, complex]:
    """(product of nonzero solutions of g^q(z) = z, (-1)^(D-1) (lam^q - 1) / lead_q) for polynomials fixing 0."""
    if not g.is_polynomial():
        raise DomainError("Product identity is stated for polynomial maps")
    poly = g.as_polynomial()
    if poly.coefficients[0] != 0:
        raise DomainError("Map must fix the origin")
    d = poly.degree
    big_d = d ** q
    lam = complex(poly.coefficients[1]) if len(poly.coefficients) > 1 else 0j
    lead = complex(poly.leading)
    if roots is None:
        roots = periodic_roots(g, q)
    product = 1 + 0j
    for z in roots:
        if is_inf(z) or z == 0:
            continue
        product *= to_complex(z)
    expected = (-1) ** (big_d - 1) * (lam ** q - 1) / lead ** ((big_d - 1) // (d - 1))
    return product, expected


def _cycles_inside(g: RationalMap, roots: List[Any], q: int, delta: float) -> List[List[complex]]:
    inside = [to_complex(z) for z in roots if not is_inf(z) and 0 < abs(to_complex(z)) < delta]
    points = [z for z, _ in merge_clusters(inside)]
    used = [False] * len(points)
    cycles = []
    for i, z in enumerate(points):
        if used[i]:
            continue
        used[i] = True
        if exact_period(g, z, q) != q:
            continue
        cycle = [z]
        w = z
        for _ in range(q - 1):
            w = g(w)
            if is_inf(w):
                break
            match = next((j for j, u in enumerate(points) if not used[j] and abs(u - w) < config.ROOT_MERGE_TOL), None)
            if match is not None:
                used[match] = True
            cycle.append(to_complex(w))
        if len(cycle) == q and all(abs(u) < delta for u in cycle):
            cycles.append(cycle)
    return cycles


def small_cycle_search(f: RationalMap, record: FixedPointRecord, q_max: int = config.SMALL_CYCLE_Q_MAX,
                       delta: float = config.SMALL_CYCLE_DELTA,
                       truncation_bits: Optional[int] = None) -> CycleSearchReport:
    """Cycles of exact period q <= q_max inside |z - z_hat| < delta, with the product cross-check."""
    if delta <= 0:
        raise ValueError("Delta must be positive")
    if record.fixed_class not in (FixedPointClass.irrationally_indifferent, FixedPointClass.rationally_indifferent):
        raise ClassificationError(f"Small-cycle search needs an indifferent fixed point, got {record.fixed_class.value}")
    g, back = _normalize(f, record)
    d = g.degree
    lam = complex(to_complex(record.multiplier))
    levels: List[CycleSearchLevel] = []
    cap_notice = None
    for q in range(1, q_max + 1):
        try:
            roots = periodic_roots(g, q)
        except DegreeOverflowError as e:
            cap_notice = f"stopped at q={q}: {e.detail}"
            logger.warning(f"Small-cycle search {cap_notice}")
            break
        nonzero = [abs(to_complex(z)) for z in roots if not is_inf(z) and z != 0]
        smallest = min(nonzero) if nonzero else None
        product = expected = product_error = None
        if g.is_polynomial():
            product, expected = product_identity(g, q, roots)
            product_error = abs(product - expected) / abs(expected) if expected != 0 else None
        else:
            logger.debug(f"Product identity skipped at q={q}: the normalized map is not polynomial")
        gap = abs(lam ** q - 1)
        bound = gap ** (1.0 / d ** q) if gap < 1 else None
        witness = (smallest is not None and smallest <= bound * (1 + 1e-9)) if bound is not None else None
        cycles = []
        for cycle in _cycles_inside(g, roots, q, delta):
            cycles.append(CycleReport(period=q, points=[to_complex(back(u)) for u in cycle],
                                      multiplier=cycle_multiplier(g, cycle),
                                      max_modulus=max(abs(u) for u in cycle)))
        if cycles:
            logger.info(f"Found {len(cycles)} cycles of period {q} inside radius {delta}")
        levels.append(CycleSearchLevel(q=q, cycles=cycles, product=product, expected_product=expected,
                                       product_error=product_error, bound=bound, bound_witness=witness,
                                       smallest_modulus=smallest))
    return CycleSearchReport(delta=delta, levels=levels, cap_notice=cap_notice, truncation_bits=truncation_bits)


# ---------------------------------------------------------------------------
# Critical-value function and radial scans

def eta(lam: complex, max_iter: int = config.ETA_MAX_ITER) -> complex:
    """phi_lam(-lam/2) for f(z) = z^2 + lam z, with phi the Koenigs coordinate at 0."""
    lam = complex(lam)
    if not 0 < abs(lam) < 1:
        raise DomainError(f"eta needs 0 < |lam| < 1, got |lam| = {abs(lam):.6g}")
    f = quadratic_family(lam)
    record = classify_fixed_point(f, 0j)
    chart = koenigs_chart(f, record, max_iter=max_iter)
    try:
        value = koenigs_extend(chart, -lam / 2)
    except NotInBasinError as e:
        logger.error(f"eta({lam:.6g}) failed after {e.iterations} iterations")
        raise ConvergenceError(f"Critical orbit did not reach the Koenigs disk for lam={lam:.6g}: {e.detail}",
                               iterations=e.iterations)
    if abs(value) > 2 + 1e-9:
        raise CertificateError(f"|eta({lam:.6g})| = {abs(value):.6g} exceeds 2")
    return value


def cauchy_riemann_residual(center: complex, step: float = config.CAUCHY_RIEMANN_STEP) -> float:
    """|d_y eta - i d_x eta| / max(1, |d_x eta|) from central differences at center."""
    dx = (eta(center + step) - eta(center - step)) / (2 * step)
    dy = (eta(center + 1j * step) - eta(center - 1j * step)) / (2 * step)
    return abs(dy - 1j * dx) / max(1.0, abs(dx))


def default_radii(max_k: int = config.RADIAL_MAX_K) -> List[float]:
    return [1.0 - 2.0 ** (-k) for k in range(1, max_k + 1)]


def _verdict(moduli: List[float], floor: float) -> Tuple[ScanVerdict, float]:
    tail = moduli[len(moduli) // 2:]
    rho = max(tail)
    if min(tail) >= floor and tail[-1] >= config.SCAN_STABLE_RATIO * tail[0]:
        return ScanVerdict.siegel, rho
    if tail[-1] < floor and all(b <= a for a, b in zip(tail, tail[1:])):
        return ScanVerdict.cremer, rho
    return ScanVerdict.inconclusive, rho


def radial_scan(xi: RotationNumber, radii: Optional[Sequence[float]] = None,
                floor: float = config.RADIAL_FLOOR, threads: int = config.THREADS,
                max_iter: int = config.ETA_MAX_ITER) -> SiegelSizeEstimate:
    """Samples |eta(r_k e^{2 pi i xi})| along an increasing schedule r_k -> 1."""
    radii = list(radii) if radii is not None else default_radii()
    if not radii or any(not 0 < r < 1 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("Radial schedule must be finite, increasing and inside (0, 1)")
    angle = float(xi)
    direction = cmath.exp(2j * math.pi * angle)

    def sample(r: float) -> complex:
        return eta(r * direction, max_iter=max_iter)

    samples: List[RadialSample] = []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = [pool.submit(sample, r) for r in radii]
        for k, (r, future) in enumerate(zip(radii, futures), start=1):
            try:
                value = future.result()
            except DynamicsError as e:
                partial = SiegelSizeEstimate(label=xi.label, angle=angle, floor=floor, samples=samples)
                raise ConvergenceError(f"Radial sample r={r} failed: {e.detail}",
                                       iterations=getattr(e, "iterations", 0), partial=partial)
            samples.append(RadialSample(k=k, r=r, value=value, modulus=abs(value)))

    verdict, rho = _verdict([s.modulus for s in samples], floor)
    flags: List[str] = []
    if any(s.modulus == 0 for s in samples):
        flags.append("eta-zero")
    residual = max(cauchy_riemann_residual(scale * direction) for scale in (0.3, 0.6))
    if residual >= config.CAUCHY_RIEMANN_TOL:
        logger.warning(f"Cauchy-Riemann residual {residual:.2e} exceeds {config.CAUCHY_RIEMANN_TOL}")
        flags.append("cauchy-riemann")
    if verdict == ScanVerdict.siegel:
        # the scan only sees the float angle; a certified non-Diophantine xi caps the verdict
        conditions = condition_report(xi, degrees=(), kappas=())
        if conditions.verdict(ConditionName.siegel) == Verdict.fails:
            verdict = ScanVerdict.inconclusive
            flags.append(f"non-diophantine@{conditions.depth}")
    logger.info(f"Radial scan of {xi.label}: {verdict.value}, rho={rho:.6g}")
    return SiegelSizeEstimate(label=xi.label, angle=angle, floor=floor, samples=samples, rho=rho,
                              verdict=verdict, cauchy_riemann=residual, flags=flags)

