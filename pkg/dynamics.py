import cmath
import logging
import math
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

import config
from errors import ClassificationError, ConvergenceError, DegreeOverflowError, DomainError, IdentityIterateError
from models.germ import GermSeries
from models.point import INF, is_inf, to_complex
from models.polynomial import Polynomial
from models.power_series import PowerSeries
from models.rational_map import RationalMap
from roots import aberth, horner_evaluator, merge_clusters, polynomial_roots
from schemas.dynamics import FixedPointClass, FixedPointRecord, OrbitTrace

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Construction and evaluation

def _deflate(poly: Polynomial, root) -> Polynomial:
    """Quotient of poly by (z - root), remainder dropped."""
    coeffs = list(poly.coefficients)
    out = [0] * (len(coeffs) - 1)
    acc = 0
    for k in range(len(coeffs) - 1, 0, -1):
        acc = acc * root + coeffs[k]
        out[k - 1] = acc
    return Polynomial(out)


def common_roots(f: RationalMap, tol: float = config.COMMON_ROOT_TOL) -> List[complex]:
    if f.numerator.degree < 1 or f.denominator.degree < 1:
        return []
    p_roots = polynomial_roots(f.numerator)
    q_roots = polynomial_roots(f.denominator)
    shared = []
    for r in q_roots:
        if any(abs(r - s) < tol * max(1.0, abs(r)) for s in p_roots):
            shared.append(r)
    return shared


def validate_map(f: RationalMap) -> RationalMap:
    shared = common_roots(f)
    if shared:
        raise DomainError(f"Numerator and denominator share the root {shared[0]:.6g}")
    return f


def cancel_common_roots(f: RationalMap) -> Tuple[RationalMap, List[complex]]:
    """Divide out numerically common linear factors; returns the map and what was removed."""
    removed = []
    while True:
        shared = common_roots(f)
        if not shared:
            return f, removed
        r = shared[0]
        if abs(r) < config.COMMON_ROOT_TOL:
            r = 0
        f = RationalMap(_deflate(f.numerator, r), _deflate(f.denominator, r))
        removed.append(complex(r))
        logger.warning(f"Cancelled common factor (z - {complex(r):.6g}) from map")


def eval_map(f: RationalMap, z):
    """f(z) on the Riemann sphere; poles go to INF and INF is evaluated by degree comparison."""
    return f(z)


def iterate(f: RationalMap, z0, k: int, escape_radius: float = config.ESCAPE_RADIUS) -> OrbitTrace:
    if k < 0 or escape_radius <= 0:
        raise ValueError("Iteration count must be non-negative and escape radius positive")
    points = [z0]
    z = z0
    for n in range(1, k + 1):
        if is_inf(z):
            return OrbitTrace(points=points, escaped=True, escape_index=n - 1)
        z = f(z)
        points.append(z)
        if is_inf(z) or abs(to_complex(z)) > escape_radius:
            return OrbitTrace(points=points, escaped=True, escape_index=n)
    return OrbitTrace(points=points)


# ---------------------------------------------------------------------------
# Local series

def _series_from_polynomial(poly: Polynomial, center, order: int) -> PowerSeries:
    shifted = poly.shift(center) if center != 0 else poly
    coeffs = list(shifted.padded(order + 1))[: order + 1]
    return PowerSeries(coeffs)


def _chart_map(f: RationalMap, source, target) -> Tuple[RationalMap, Any]:
    """f written in the charts z (finite) or 1/z (infinity) at source and target."""
    d = f.degree
    if is_inf(source):
        g = RationalMap(f.numerator.reversed(d), f.denominator.reversed(d))
        center = 0
    else:
        g, center = f, source
    if is_inf(target):
        g = RationalMap(g.denominator, g.numerator)
    return g, center


def transfer_series(f: RationalMap, source, target, order: int) -> PowerSeries:
    """Series of f from source to target in local charts, constant term dropped."""
    if order > config.GERM_ORDER_CAP:
        raise DomainError(f"Germ order {order} exceeds cap {config.GERM_ORDER_CAP}")
    g, center = _chart_map(f, source, target)
    num = _series_from_polynomial(g.numerator, center, order)
    den = _series_from_polynomial(g.denominator, center, order)
    if den[0] == 0:
        raise DomainError(f"Point {source} is a pole in the chosen chart")
    series = num / den
    return PowerSeries([0 * series[0]] + list(series.coefficients[1:]))


def taylor_germ(f: RationalMap, z_hat, order: int) -> GermSeries:
    """Taylor coefficients a_1..a_N of f at a fixed point, by series division of P and Q."""
    if order < 1:
        raise ValueError("Germ order must be at least 1")
    return GermSeries.from_power_series(transfer_series(f, z_hat, z_hat, order))


def cycle_germ(f: RationalMap, cycle: Sequence[Any], order: int) -> GermSeries:
    """Germ of f^{len(cycle)} at cycle[0], composed from transfer series along the cycle."""
    n = len(cycle)
    result: Optional[PowerSeries] = None
    for j in range(n):
        step = transfer_series(f, cycle[j], cycle[(j + 1) % n], order)
        result = step if result is None else step.compose(result)
    return GermSeries.from_power_series(result)


def transition_derivative(f: RationalMap, source, target) -> complex:
    g, center = _chart_map(f, source, target)
    return to_complex(g.derivative(center))


def cycle_multiplier(f: RationalMap, cycle: Sequence[Any]) -> complex:
    lam = 1 + 0j
    n = len(cycle)
    for j in range(n):
        lam *= transition_derivative(f, cycle[j], cycle[(j + 1) % n])
    return lam


# ---------------------------------------------------------------------------
# Classification

def rational_rotation(lam: complex) -> Tuple[Fraction, float, float]:
    """Best p/q with q <= ROOT_OF_UNITY_MAX_Q for xi = arg(lam)/2pi in (0, 1]."""
    xi = cmath.phase(lam) / (2 * math.pi)
    xi = xi % 1.0
    if xi == 0.0:
        xi = 1.0
    frac = Fraction(xi).limit_denominator(config.ROOT_OF_UNITY_MAX_Q)
    if frac == 0:
        frac = Fraction(1)
    err = abs(xi - float(frac))
    err = min(err, abs(1.0 - err))
    return frac, xi, err


def germ_multiplicity(germ: GermSeries, tol: float = config.GERM_ZERO_TOL) -> int:
    """Order of the first nonvanishing term of germ(z) - z, starting at z^2."""
    for k in range(2, germ.order + 1):
        if abs(to_complex(germ.coefficient(k))) > tol:
            return k
    raise IdentityIterateError(
        f"All coefficients through order {germ.order} vanish; possibly identity iterate")


def local_degree(germ: GermSeries, tol: float = config.GERM_ZERO_TOL) -> int:
    for k in range(1, germ.order + 1):
        if abs(to_complex(germ.coefficient(k))) > tol:
            return k
    raise IdentityIterateError("Germ vanishes identically to truncation order")


def _record(f: RationalMap, cycle: Sequence[Any], lam: complex) -> FixedPointRecord:
    period = len(cycle)
    location = cycle[0]
    base = dict(location=location, period=period, multiplier=lam, cycle=list(cycle))
    modulus = abs(lam)
    if modulus < config.SUPERATTRACTING_TOL:
        germ = cycle_germ(f, cycle, config.MULTIPLICITY_ORDER)
        return FixedPointRecord(fixed_class=FixedPointClass.superattracting,
                                local_degree=local_degree(germ), **base)
    if modulus < 1 - config.UNIT_CIRCLE_BAND:
        return FixedPointRecord(fixed_class=FixedPointClass.attracting, **base)
    if modulus > 1 + config.UNIT_CIRCLE_BAND:
        return FixedPointRecord(fixed_class=FixedPointClass.repelling, **base)
    frac, xi, err = rational_rotation(lam)
    if err < config.ROOT_OF_UNITY_TOL:
        q = frac.denominator
        order = max(config.MULTIPLICITY_ORDER, 2 * q + 2)
        germ = cycle_germ(f, cycle, order).iterate(q)
        multiplicity = germ_multiplicity(germ)
        return FixedPointRecord(fixed_class=FixedPointClass.rationally_indifferent, rotation=frac,
                                angle=xi, multiplicity=multiplicity, **base)
    ambiguous = err < config.AMBIGUOUS_TOL
    if ambiguous:
        logger.warning(f"Rotation number {xi:.12f} is within {err:.1e} of {frac}; flagged ambiguous")
    return FixedPointRecord(fixed_class=FixedPointClass.irrationally_indifferent, angle=xi,
                            ambiguous=ambiguous, **base)


def fixed_point_residual(f: RationalMap, z_hat) -> float:
    if is_inf(z_hat):
        return 0.0 if is_inf(f(INF)) else float("inf")
    w = f(z_hat)
    if is_inf(w):
        return float("inf")
    return abs(to_complex(w) - to_complex(z_hat))


def classify_fixed_point(f: RationalMap, z_hat) -> FixedPointRecord:
    scale = 1.0 if is_inf(z_hat) else max(1.0, abs(to_complex(z_hat)))
    residual = fixed_point_residual(f, z_hat)
    if residual > 10 * config.FIXED_POINT_TOL * scale:
        raise ClassificationError(f"Point {z_hat} is not fixed (|f(z)-z| = {residual:.3e})")
    lam = transition_derivative(f, z_hat, z_hat)
    return _record(f, [z_hat], lam)


def _sort_key(z):
    if is_inf(z):
        return (1, 0.0, 0.0)
    z = to_complex(z)
    return (0, round(abs(z), 9), round(cmath.phase(z), 9))


def _newton_polish(poly: Polynomial, z: complex, steps: int = 3) -> complex:
    for _ in range(steps):
        p, dp = poly.eval_with_derivative(z)
        if dp == 0:
            break
        z = z - p / dp
    return z


def find_fixed_points(f: RationalMap) -> List[FixedPointRecord]:
    fixed_eq = f.numerator - f.denominator * Polynomial([0, 1])
    try:
        raw = polynomial_roots(fixed_eq)
    except ConvergenceError as e:
        logger.error(f"Fixed point solve failed: {e.detail}")
        raise ConvergenceError(f"Failed to locate fixed points: {e.detail}",
                               iterations=e.iterations, partial=e.partial)
    complex_eq = fixed_eq.as_complex()
    points: List[Any] = []
    for z, mult in merge_clusters(raw):
        points.append(_newton_polish(complex_eq, z) if mult == 1 else z)
    if f.numerator.degree > f.denominator.degree:
        points.append(INF)
    points.sort(key=_sort_key)
    return [classify_fixed_point(f, z) for z in points]


# ---------------------------------------------------------------------------
# Periodic points

def escape_bound(poly: Polynomial) -> float:
    """Radius outside which every orbit of the polynomial escapes."""
    c = [complex(a) for a in poly.coefficients]
    lead = abs(c[-1])
    return max(1.0, (1.0 + sum(abs(a) for a in c[:-1])) / lead)


def _iterate_evaluator(poly: Polynomial, q: int):
    horner = horner_evaluator([complex(a) for a in poly.coefficients])

    def evaluate(z: np.ndarray):
        w = z.copy()
        dw = np.ones_like(z)
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(q):
                p, dp = horner(w)
                dw = dw * dp
                w = p
        return w - z, dw - 1.0

    return evaluate


def _origin_multiplicity(f: RationalMap, q: int) -> int:
    """Multiplicity of 0 as a root of f^q(z) - z, for maps fixing 0 exactly."""
    germ = taylor_germ(f, 0, max(config.MULTIPLICITY_ORDER, q + 2)).iterate(q)
    if abs(to_complex(germ.multiplier) - 1) > config.GERM_ZERO_TOL:
        return 1
    return germ_multiplicity(germ)


def periodic_roots(f: RationalMap, q: int) -> List[Any]:
    """All solutions of f^q(z) = z on the sphere, with multiplicity."""
    if q < 1:
        raise ValueError("Period must be at least 1")
    d = f.degree
    count = d ** q + 1
    if count > config.PERIODIC_DEGREE_CAP:
        raise DegreeOverflowError(f"Degree {d}^{q} exceeds root-solver cap {config.PERIODIC_DEGREE_CAP - 1}")
    if f.is_polynomial():
        poly = f.as_polynomial()
        degree = d ** q
        known = []
        if poly.coefficients[0] == 0:
            m0 = _origin_multiplicity(f, q)
            known = [(0j, m0)]
            degree -= m0
        try:
            found = aberth(_iterate_evaluator(poly, q), degree, 1.1 * escape_bound(poly), known)
        except ConvergenceError as e:
            raise ConvergenceError(f"Periodic point solve failed for q={q}: {e.detail}",
                                   iterations=e.iterations, partial=e.partial)
        roots = [0j] * (known[0][1] if known else 0) + found.tolist()
        return roots + [INF]
    fq = f.iterate(q)
    roots: List[Any] = polynomial_roots(fq.numerator - fq.denominator * Polynomial([0, 1]))
    if fq.numerator.degree > fq.denominator.degree:
        roots.append(INF)
    return roots


def _close(a, b, tol: float) -> bool:
    if is_inf(a) or is_inf(b):
        return is_inf(a) and is_inf(b)
    return abs(to_complex(a) - to_complex(b)) < tol * max(1.0, abs(to_complex(b)))


def exact_period(f: RationalMap, z, q: int, tol: float = config.PERIOD_FILTER_TOL) -> int:
    for k in range(1, q + 1):
        if q % k:
            continue
        w = z
        for _ in range(k):
            w = f(w)
        if _close(w, z, tol):
            return k
    return q


def find_periodic_points(f: RationalMap, q: int) -> List[FixedPointRecord]:
    """One record per cycle of exact period dividing q; the multiplier is that of f^period."""
    if q == 1:
        return find_fixed_points(f)
    raw = periodic_roots(f, q)
    finite = [z for z in raw if not is_inf(z)]
    points: List[Any] = [z for z, _ in merge_clusters(finite)]
    if any(is_inf(z) for z in raw):
        points.append(INF)
    points.sort(key=_sort_key)
    used = [False] * len(points)
    records = []
    for i, z in enumerate(points):
        if used[i]:
            continue
        k = exact_period(f, z, q)
        cycle = [z]
        used[i] = True
        w = z
        for _ in range(k - 1):
            w = f(w)
            match = next((j for j, u in enumerate(points) if not used[j] and _close(u, w, config.ROOT_MERGE_TOL)), None)
            if match is not None:
                used[match] = True
                w = points[match]
            cycle.append(w)
        lam = cycle_multiplier(f, cycle)
        records.append(_record(f, cycle, lam))
    logger.debug(f"Found {len(records)} cycles with period dividing {q}")
    return records
