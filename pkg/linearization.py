import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

import config
from dynamics import taylor_germ
from errors import ClassificationError, ConvergenceError, DomainError, NotInBasinError
from models.germ import GermSeries
from models.point import INF, is_inf, to_complex
from models.polynomial import Polynomial
from models.rational_map import RationalMap
from roots import polynomial_roots
from schemas.charts import ChartKind, ChartReport, MaxDiskReport
from schemas.dynamics import FixedPointClass, FixedPointRecord

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Coefficient recursions

def linearizing_coefficients(germ: GermSeries, order: int):
    """Solve h(lam z) = f(h(z)) with h(z) = z + h_2 z^2 + ... term by term.

    Returns (h, numerators, divisors) indexed from 1, where
    h_n = numerators[n] / divisors[n], numerators[n] = a_n + X_n and
    divisors[n] = lam^n - lam. Works over any field the coefficients live in.
    Germ coefficients past its truncation order are taken as zero.
    """
    h, numerators, divisors, _ = solve_linearization(germ.multiplier, germ.coefficients[1:order], order)
    return h, numerators, divisors


def solve_linearization(lam: Any, known: Sequence[Any], order: int,
                        choose: Optional[Callable[[int, Any], Any]] = None):
    """Core recursion behind linearizing_coefficients.

    ``known`` holds a_2, a_3, ...; once it runs out, ``choose(n, X_n)``
    picks a_n (zero when no chooser is given). Returns (h, numerators,
    divisors, a) with a indexed from 1.
    """
    zero = 0 * lam
    one = zero + 1
    a = [zero, lam] + list(known[: order - 1])
    h = [zero, one] + [zero] * (order - 1)
    numerators = [zero] * (order + 1)
    divisors = [zero] * (order + 1)
    # powers[j][m] = coefficient of z^m in h(z)^j
    powers = [[zero] * (order + 1) for _ in range(order + 1)]
    powers[1][1] = one
    lam_pow = lam
    for n in range(2, order + 1):
        lam_pow = lam_pow * lam
        x_n = zero
        for j in range(2, n + 1):
            val = zero
            for m in range(1, n - j + 2):
                if h[m] != 0 and powers[j - 1][n - m] != 0:
                    val = val + h[m] * powers[j - 1][n - m]
            powers[j][n] = val
            if j < n and a[j] != 0 and val != 0:
                x_n = x_n + a[j] * val
        if n >= len(a):
            a.append(choose(n, x_n) if choose is not None else zero)
        # h(z)^n starts with z^n, so a_n enters with coefficient one
        total = x_n + a[n]
        divisor = lam_pow - lam
        if divisor == 0:
            raise DomainError(f"Resonant divisor lam^{n} - lam vanishes")
        h[n] = total / divisor
        powers[1][n] = h[n]
        numerators[n] = total
        divisors[n] = divisor
    return h, numerators, divisors, a


def koenigs_coefficients(germ: GermSeries, order: int) -> List[complex]:
    """Series of phi with phi(f(u)) = lam phi(u), phi(u) = u + ..., indexed from 1."""
    lam = complex(germ.multiplier)
    a = [0j] + [complex(c) for c in germ.coefficients[:order]]
    while len(a) <= order:
        a.append(0j)
    # f_pow[j][k] = coefficient of u^k in f(u)^j
    f_pow = [[0j] * (order + 1) for _ in range(order + 1)]
    f_pow[1] = a[:]
    for j in range(2, order + 1):
        prev = f_pow[j - 1]
        row = f_pow[j]
        for k in range(j, order + 1):
            acc = 0j
            for i in range(1, k - j + 2):
                if a[i] != 0 and prev[k - i] != 0:
                    acc += a[i] * prev[k - i]
            row[k] = acc
    phi = [0j, 1 + 0j] + [0j] * (order - 1)
    lam_pow = lam
    for k in range(2, order + 1):
        lam_pow *= lam
        acc = 0j
        for j in range(1, k):
            if phi[j] != 0:
                acc += phi[j] * f_pow[j][k]
        phi[k] = acc / (lam - lam_pow)
    return phi


def root_test_radius(coefficients: Sequence[Any], tail_start: Optional[int] = None) -> float:
    """1 / max_{n in tail} |c_n|^(1/n); infinity when the tail vanishes."""
    n_max = len(coefficients) - 1
    start = tail_start if tail_start is not None else max(2, n_max // 2)
    worst = 0.0
    for n in range(start, n_max + 1):
        mag = abs(to_complex(coefficients[n]))
        if mag > 0:
            worst = max(worst, mag ** (1.0 / n))
    return math.inf if worst == 0 else 1.0 / worst


def _eval_series(coeffs: Sequence[complex], u: complex) -> Tuple[complex, complex]:
    p = 0j
    dp = 0j
    for c in reversed(coeffs):
        dp = dp * u + p
        p = p * u + c
    return p, dp


# ---------------------------------------------------------------------------
# Koenigs charts

@dataclass(frozen=True)
class KoenigsChart:
    """Koenigs coordinate phi at an attracting or repelling fixed point, phi'(z_hat) = 1.

    The map is stored in the local coordinate where the fixed point is finite;
    ``swap`` marks a point at infinity handled through w = 1/z. A chart with
    ``local_radius == 0`` evaluates the plain limit with no local series.
    """
    map: RationalMap
    z_hat: complex
    multiplier: complex
    local_radius: float
    phi: Tuple[complex, ...] = field(repr=False)
    inverse: Tuple[complex, ...] = field(repr=False)
    max_iter: int = config.KOENIGS_MAX_ITER
    tol: float = config.KOENIGS_STEP_TOL
    swap: bool = False

    @property
    def repelling(self) -> bool:
        return abs(self.multiplier) > 1

    @property
    def plain(self) -> bool:
        return self.local_radius == 0.0

    @property
    def branch_multiplier(self) -> complex:
        """Multiplier of the branch the chart linearizes (1/lam for f^-1 at a repelling point)."""
        return 1 / self.multiplier if self.repelling else self.multiplier

    @property
    def switch_radius(self) -> float:
        return config.SWITCH_FACTOR * self.local_radius

    def to_local(self, z):
        if not self.swap:
            return z
        if is_inf(z):
            return 0j
        return INF if z == 0 else 1 / z

    def from_local(self, z):
        return self.to_local(z)

    def local(self, u: complex) -> Tuple[complex, complex]:
        """(phi, phi') from the truncated series at offset u from z_hat."""
        return _eval_series(self.phi, u)

    def inverse_local(self, w: complex) -> complex:
        return self.z_hat + _eval_series(self.inverse, w)[0]

    def evaluate(self, z) -> Tuple[complex, complex]:
        """(phi(z), phi'(z)) for z in the local coordinate."""
        if is_inf(z):
            raise NotInBasinError("Point at infinity is outside the chart")
        if self.repelling:
            return _evaluate_repelling(self, z)
        return koenigs_extend_local(self, z)

    def __call__(self, z):
        return self.evaluate(self.to_local(z))[0]

    def residual(self, points: Sequence[complex]) -> float:
        """sup |phi(f(z)) - lam phi(z)| over points given in the local coordinate."""
        lam = self.multiplier
        worst = 0.0
        for z in points:
            fz = self.map(z)
            if is_inf(fz):
                continue
            worst = max(worst, abs(self.evaluate(fz)[0] - lam * self.evaluate(z)[0]))
        return worst


def inverse_branch(f: RationalMap, z_hat: complex, lam: complex, target: complex) -> Tuple[complex, complex]:
    """Preimage of target on the branch fixing z_hat, by Newton from z_hat + (target - z_hat)/lam.

    Returns the preimage and the derivative of the branch there.
    """
    z = z_hat + (target - z_hat) / lam
    for _ in range(config.NEWTON_MAX_ITER):
        fz, dfz = f.value_and_derivative(z)
        if is_inf(fz) or dfz == 0:
            break
        step = (fz - target) / dfz
        z -= step
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
    fz, dfz = f.value_and_derivative(z)
    if is_inf(fz) or dfz == 0 or abs(fz - target) > 1e-10 * max(1.0, abs(target)):
        raise ConvergenceError(f"Inverse branch Newton failed near {target:.6g}")
    return z, 1 / dfz


def _evaluate_repelling(chart: KoenigsChart, z: complex) -> Tuple[complex, complex]:
    """Pull z toward z_hat with the local inverse branch, then apply the series (or the plain limit)."""
    lam = chart.multiplier
    z_hat = chart.z_hat
    n = 0
    deriv = 1 + 0j
    if chart.plain:
        scale = 1 + 0j
        w = z - z_hat
        while n < chart.max_iter:
            z, dz = inverse_branch(chart.map, z_hat, lam, z)
            deriv *= dz
            scale *= lam
            n += 1
            w_next = (z - z_hat) * scale
            if abs(w_next - w) < chart.tol * max(1.0, abs(w_next)):
                return w_next, deriv * scale
            w = w_next
        raise ConvergenceError(f"Plain repelling limit did not settle after {n} steps", iterations=n)
    while abs(z - z_hat) >= chart.switch_radius:
        if n >= chart.max_iter:
            raise ConvergenceError(f"Inverse branch did not reach the chart after {n} steps", iterations=n)
        z, dz = inverse_branch(chart.map, z_hat, lam, z)
        deriv *= dz
        n += 1
    value, dvalue = chart.local(z - z_hat)
    scale = lam ** n
    return value * scale, dvalue * deriv * scale


def koenigs_chart(f: RationalMap, record: FixedPointRecord,
                  series_order: int = config.KOENIGS_SERIES_ORDER,
                  max_iter: int = config.KOENIGS_MAX_ITER) -> KoenigsChart:
    """Koenigs chart at an attracting (lam != 0) or repelling fixed point.

    series_order=1 gives the plain limit (z_n - z_hat)/lam^n with no local series.
    """
    if record.fixed_class not in (FixedPointClass.attracting, FixedPointClass.repelling):
        raise ClassificationError(
            f"Koenigs chart needs an attracting or repelling point, got {record.fixed_class.value}; "
            f"use parabolic charts for roots of unity and Boettcher charts for superattracting points")
    if record.period != 1:
        raise ClassificationError("Koenigs charts are built for fixed points; pass the iterate for cycles")
    swap = is_inf(record.location)
    g = f.swapped() if swap else f
    z_hat = 0j if swap else to_complex(record.location)
    germ = taylor_germ(g, z_hat, max(series_order, 2))
    lam = complex(germ.multiplier)
    if series_order > 1:
        phi = koenigs_coefficients(germ, series_order)
        inverse = [complex(c) for c in linearizing_coefficients(germ, series_order)[0]]
        radius = min(root_test_radius(phi), root_test_radius(inverse))
        local_radius = 0.5 * radius if math.isfinite(radius) else 1.0
    else:
        phi = [0j, 1 + 0j]
        inverse = [0j, 1 + 0j]
        local_radius = 0.0
    logger.debug(f"Koenigs chart at {z_hat:.6g}: lam={lam:.6g}, local radius {local_radius:.3e}")
    return KoenigsChart(g, z_hat, lam, local_radius, tuple(phi), tuple(inverse), max_iter, swap=swap)


def koenigs_extend_local(chart: KoenigsChart, z) -> Tuple[complex, complex]:
    """(phi(z), phi'(z)) in the chart's local coordinate, following the orbit into the disk."""
    lam = chart.multiplier
    z_hat = chart.z_hat
    n = 0
    deriv = 1 + 0j
    if chart.plain:
        w = z - z_hat
        scale = 1 + 0j
        while n < chart.max_iter:
            fz, dfz = chart.map.value_and_derivative(z)
            if is_inf(fz):
                raise NotInBasinError(f"Orbit reached infinity after {n} steps", iterations=n)
            deriv *= dfz
            z = fz
            n += 1
            scale *= lam
            w_next = (z - z_hat) / scale
            if abs(w_next - w) < chart.tol * max(1.0, abs(w_next)):
                return w_next, deriv / scale
            w = w_next
        raise NotInBasinError(f"Plain Koenigs limit did not settle after {n} iterations", iterations=n)
    while abs(z - z_hat) >= chart.switch_radius:
        if n >= chart.max_iter:
            raise NotInBasinError(f"Orbit did not enter the local chart after {n} iterations", iterations=n)
        fz, dfz = chart.map.value_and_derivative(z)
        if is_inf(fz) or abs(fz) > 1e150:
            raise NotInBasinError(f"Orbit escaped after {n} iterations", iterations=n)
        deriv *= dfz
        z = fz
        n += 1
    value, dvalue = chart.local(z - z_hat)
    scale = lam ** n
    return value / scale, dvalue * deriv / scale


def koenigs_extend(chart: KoenigsChart, z0):
    """phi on the whole basin: follow the orbit into the local disk, then divide by lam^n."""
    if chart.repelling:
        raise ClassificationError("Basin extension needs an attracting chart")
    z = chart.to_local(z0)
    if is_inf(z):
        raise NotInBasinError("Point at infinity is not in the basin")
    return koenigs_extend_local(chart, z)[0]


def repelling_parametrization(chart: KoenigsChart, w: complex):
    """psi(w) = f^n(z_hat + h(w / lam^n)) with f(psi(w)) = psi(lam w)."""
    if not chart.repelling:
        raise ClassificationError("Repelling parametrization needs a repelling chart")
    if chart.plain:
        raise ClassificationError("Repelling parametrization needs the local series")
    lam = chart.multiplier
    n = 0
    while abs(w) / abs(lam) ** n >= chart.switch_radius:
        n += 1
        if n > chart.max_iter:
            raise ConvergenceError(f"Could not shrink {w} into the local chart", iterations=n)
    z = chart.inverse_local(w / lam ** n)
    for _ in range(n):
        if is_inf(z):
            break
        z = chart.map(z)
    return chart.from_local(z)


def spiral_angles(chart: KoenigsChart, w0: complex, count: int = 20) -> np.ndarray:
    """Unwrapped arguments of psi(w0 / lam^k) - z_hat for k = 0..count."""
    lam = chart.multiplier
    values = [chart.to_local(repelling_parametrization(chart, w0 / lam ** k)) - chart.z_hat
              for k in range(count + 1)]
    return np.unwrap(np.angle(np.array(values, dtype=complex)))


# ---------------------------------------------------------------------------
# Maximal linearization disk

def critical_points(f: RationalMap) -> List[complex]:
    """Finite zeros of P'Q - PQ'."""
    p, q = f.numerator, f.denominator
    wronskian = p.derivative() * q - p * q.derivative()
    if wronskian.is_zero() or wronskian.degree == 0:
        return []
    return [complex(c) for c in polynomial_roots(wronskian)]


def _solve_phi(chart: KoenigsChart, target: complex, seed: complex) -> complex:
    z = seed
    for _ in range(config.NEWTON_MAX_ITER):
        value, deriv = koenigs_extend_local(chart, z)
        if deriv == 0:
            break
        step = (value - target) / deriv
        z -= step
        if abs(step) < 1e-14 * max(1.0, abs(z)):
            break
    value, _ = koenigs_extend_local(chart, z)
    if abs(value - target) > 1e-9 * max(1.0, abs(target)):
        raise ConvergenceError(f"Could not invert phi at {target:.6g}")
    return z


def boundary_sample(chart: KoenigsChart, radius: float, avoid: complex, count: int = 64) -> List[complex]:
    """Points z_1 with |phi(z_1)| = radius, reached by continuation from z_hat.

    Angles within pi/64 of arg(avoid), the critical value, are skipped.
    """
    theta0 = cmath.phase(avoid) + math.pi / 64
    span = 2 * math.pi - math.pi / 32
    start = min(radius, 0.5 * chart.switch_radius)
    z = chart.inverse_local(start * cmath.exp(1j * theta0))
    # radial leg out to the circle
    legs = 40
    for k in range(1, legs + 1):
        t = start + (radius - start) * k / legs
        z = _solve_phi(chart, t * cmath.exp(1j * theta0), z)
    samples = [z]
    for k in range(1, count):
        theta = theta0 + span * k / (count - 1)
        z = _solve_phi(chart, radius * cmath.exp(1j * theta), z)
        samples.append(z)
    return samples


def max_disk(f: RationalMap, record: FixedPointRecord, boundary_points: int = 64) -> MaxDiskReport:
    if record.fixed_class != FixedPointClass.attracting:
        raise ClassificationError("Maximal disk needs an attracting fixed point with nonzero multiplier")
    if f.degree < 2:
        raise DomainError("Maximal disk needs a map of degree at least 2")
    chart = koenigs_chart(f, record)
    best: Optional[Tuple[float, complex, complex]] = None
    for omega in critical_points(f):
        try:
            value = koenigs_extend(chart, omega)
        except (NotInBasinError, ConvergenceError):
            continue
        if best is None or abs(value) < best[0]:
            best = (abs(value), omega, value)
    if best is None:
        logger.error("No critical point found in the basin")
        raise ConvergenceError("No critical point lies in the basin; numerical failure")
    radius, omega, value = best
    local_boundary = boundary_sample(chart, radius, value, boundary_points) if boundary_points else []
    deviation = max((abs(abs(koenigs_extend_local(chart, z)[0]) - radius) for z in local_boundary), default=0.0)
    image_inside = all(abs(koenigs_extend_local(chart, chart.map(z))[0]) < radius for z in local_boundary)
    logger.debug(f"Maximal disk radius {radius:.10g} at critical point {omega:.6g}")
    return MaxDiskReport(radius=radius, critical_point=omega,
                         boundary=[chart.from_local(z) for z in local_boundary],
                         boundary_deviation=deviation, image_inside=image_inside)


# ---------------------------------------------------------------------------
# Boettcher charts

@dataclass(frozen=True)
class BoettcherChart:
    """Boettcher coordinate with phi(f(z)) = phi(z)^n near a superattracting point.

    At infinity the domain is |z| >= radius; at a finite point it is
    |z - z_hat| <= radius. ``alpha`` satisfies alpha^(n-1) = a_n on branch ``branch``.
    """
    map: RationalMap
    at_infinity: bool
    z_hat: complex
    degree: int
    leading: complex
    alpha: complex
    branch: int
    radius: float

    def defect(self, w: complex) -> complex:
        """c with g(w) = w^n (1 + c) for the normalized map g(w) = alpha (f(w/alpha + z_hat) - z_hat)."""
        z = w / self.alpha + self.z_hat
        fz = self.map(z)
        if is_inf(fz):
            return complex("inf")
        return (self.alpha * (fz - self.z_hat)) / w ** self.degree - 1

    def in_domain(self, z) -> bool:
        if is_inf(z):
            return self.at_infinity
        u = abs(z - self.z_hat)
        return u >= self.radius if self.at_infinity else u <= self.radius

    def __call__(self, z):
        if is_inf(z):
            if self.at_infinity:
                return INF
            raise DomainError("Infinity is outside a finite Boettcher chart")
        if not self.in_domain(z):
            raise DomainError(f"Point {z} lies outside the Boettcher domain (radius {self.radius:.4g})")
        if z == self.z_hat and not self.at_infinity:
            return 0j
        n = self.degree
        w = self.alpha * (z - self.z_hat)
        result = w
        exponent = 1.0 / n
        for _ in range(config.BOETTCHER_MAX_STEPS):
            c = self.defect(w)
            if abs(c) < config.BOETTCHER_TERM_TOL:
                break
            result *= (1 + c) ** exponent
            exponent /= n
            # stop before w^n leaves the float range; c is negligible there
            log_next = n * math.log(abs(w))
            if abs(log_next) > 600 or exponent < 1e-300:
                break
            w = w ** n * (1 + c)
        return result

    def lift(self, big_z: complex) -> complex:
        """F(Z) = nZ + Log(1 + c(e^Z)) on the sheet of Z, so F(Z + 2 pi i) = F(Z) + 2 pi i n."""
        k = math.floor((big_z.imag + math.pi) / (2 * math.pi))
        reduced = big_z - 2j * math.pi * k
        value = self.degree * reduced + cmath.log(1 + self.defect(cmath.exp(reduced)))
        return value + 2j * math.pi * self.degree * k

    def lift_bound(self, samples: int = 64) -> float:
        """sup |F(Z) - nZ| on the boundary line of the working half-plane."""
        sigma = math.log(abs(self.alpha) * self.radius)
        worst = 0.0
        for k in range(samples):
            big_z = complex(sigma, -math.pi + 2 * math.pi * k / samples)
            worst = max(worst, abs(self.lift(big_z) - self.degree * big_z))
        return worst

    def residual(self, points: Sequence[complex]) -> float:
        worst = 0.0
        for z in points:
            fz = self.map(z)
            if is_inf(fz) or not self.in_domain(fz):
                continue
            worst = max(worst, abs(self(fz) - self(z) ** self.degree))
        return worst


def _domain_radius(args: dict, at_infinity: bool) -> float:
    """Double (infinity) or halve (finite point) until |c| <= 1/4 and the orbit moves the right way."""
    trial = BoettcherChart(radius=0.0, **args)
    alpha = args["alpha"]
    n = args["degree"]
    angles = np.exp(2j * np.pi * np.arange(64) / 64)
    radius = 1.0
    for _ in range(200):
        w_mod = abs(alpha) * radius
        if at_infinity:
            moves = 0.75 * w_mod ** n >= 2 * w_mod
        else:
            moves = 1.25 * w_mod ** n <= 0.5 * w_mod
        if moves and all(abs(trial.defect(alpha * radius * complex(e))) <= 0.25 for e in angles):
            return radius
        radius = radius * 2 if at_infinity else radius / 2
    raise ConvergenceError("Could not find a Boettcher domain")


def boettcher_chart(f: RationalMap, record: FixedPointRecord, branch: int = 0) -> BoettcherChart:
    if record.fixed_class != FixedPointClass.superattracting:
        raise ClassificationError(f"Boettcher chart needs a superattracting point, got {record.fixed_class.value}")
    at_infinity = is_inf(record.location)
    if at_infinity:
        if not f.is_polynomial():
            raise DomainError("Boettcher chart at infinity is implemented for polynomials")
        poly = f.as_polynomial()
        n = poly.degree
        leading = complex(poly.leading)
        z_hat = 0j
    else:
        z_hat = to_complex(record.location)
        germ = taylor_germ(f, z_hat, config.MULTIPLICITY_ORDER)
        n = record.local_degree or 2
        leading = complex(germ.coefficient(n))
    if n < 2:
        raise ClassificationError("Local degree must be at least 2")
    alpha = cmath.exp((cmath.log(leading) + 2j * math.pi * branch) / (n - 1))
    args = dict(map=f, at_infinity=at_infinity, z_hat=z_hat, degree=n, leading=leading,
                alpha=alpha, branch=branch % (n - 1))
    radius = _domain_radius(args, at_infinity)
    logger.debug(f"Boettcher chart of degree {n}: alpha={alpha:.6g}, radius {radius:.4g}")
    return BoettcherChart(radius=radius, **args)


# ---------------------------------------------------------------------------
# Reports

def chart_report(f: RationalMap, record: FixedPointRecord, samples: int = 100) -> ChartReport:
    """Functional-equation residual on a grid around the fixed point."""
    if record.fixed_class == FixedPointClass.superattracting:
        chart = boettcher_chart(f, record)
        base = 2 * chart.radius if chart.at_infinity else 0.5 * chart.radius
        pts = [chart.z_hat + base * (1 + 0.5 * k / samples) * cmath.exp(2.4j * k) for k in range(samples)]
        return ChartReport(kind=ChartKind.boettcher, location=chart.z_hat, multiplier=record.multiplier,
                           residual=chart.residual(pts), samples=samples, radius=chart.radius,
                           normalization=chart.lift_bound(),
                           note="infinity" if chart.at_infinity else None)
    chart = koenigs_chart(f, record)
    r = chart.local_radius
    pts = [chart.z_hat + r * (0.2 + 0.8 * k / samples) * cmath.exp(2.4j * k) for k in range(samples)]
    h = 1e-6 * max(r, 1e-3)
    derivative = (chart.evaluate(chart.z_hat + h)[0] - chart.evaluate(chart.z_hat - h)[0]) / (2 * h)
    return ChartReport(kind=ChartKind.koenigs, location=chart.z_hat, multiplier=chart.multiplier,
                       residual=chart.residual(pts), samples=samples, radius=r,
                       normalization=abs(derivative - 1),
                       note="infinity" if chart.swap else None)


def quadratic_family(lam: complex) -> RationalMap:
    """f(z) = z^2 + lam z."""
    return RationalMap(Polynomial([0, lam, 1]), Polynomial([1]))
