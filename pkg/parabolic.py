import cmath
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from dynamics import germ_multiplicity, taylor_germ
from errors import (CertificateError, ClassificationError, ConvergenceError, DomainError,
                    DynamicsError, NotInBasinError)
from models.germ import GermSeries
from models.point import INF, is_inf, to_complex
from models.polynomial import Polynomial
from models.power_series import PowerSeries
from models.rational_map import RationalMap
from schemas.charts import ChartKind, ChartReport, PetalReport, PetalType
from schemas.dynamics import FixedPointRecord

logger = logging.getLogger(__name__)

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(config.QUADRATURE_NODES)


# ---------------------------------------------------------------------------
# Local dynamics at the parabolic point

@dataclass(frozen=True)
class LocalIterate:
    """F = g^q in an offset coordinate u where the parabolic point sits at 0."""
    map: RationalMap
    period: int

    def forward(self, u: complex) -> Tuple[complex, complex]:
        z = u
        deriv = 1 + 0j
        for _ in range(self.period):
            fz, dfz = self.map.value_and_derivative(z)
            if is_inf(fz):
                raise NotInBasinError("Orbit hit a pole")
            deriv *= dfz
            z = fz
        return z, deriv

    def backward(self, u: complex) -> Tuple[complex, complex]:
        """Local inverse branch of F fixing 0, by Newton from 2u - F(u)."""
        try:
            x = 2 * u - self.forward(u)[0]
        except NotInBasinError:
            x = u
        d = 1 + 0j
        for _ in range(config.NEWTON_MAX_ITER):
            val, d = self.forward(x)
            if d == 0:
                break
            step = (val - u) / d
            x -= step
            if abs(step) <= 1e-15 * abs(x):
                break
        val, d = self.forward(x)
        if d == 0 or abs(val - u) > 1e-12 * max(abs(u), 1e-300):
            raise ConvergenceError(f"Local inverse branch failed at {u:.6g}")
        return x, 1 / d


def _centered_map(f: RationalMap, z_hat) -> Tuple[RationalMap, bool]:
    """f in a coordinate where z_hat is exactly 0 (1/z at infinity, translation otherwise)."""
    swap = is_inf(z_hat)
    g = f.swapped() if swap else f
    if not swap and to_complex(z_hat) != 0:
        g = g.conjugate_by_translation(to_complex(z_hat))
    coeffs = g.numerator.coefficients
    if g.denominator(0) != 0 and coeffs[0] != 0:
        g = RationalMap(Polynomial([0 * coeffs[0]] + list(coeffs[1:])), g.denominator)
    return g, swap


def leading_term(germ: GermSeries) -> Tuple[int, complex]:
    """(n, a) for a germ u + a u^(n+1) + ... with multiplier 1."""
    lam = to_complex(germ.multiplier)
    if abs(lam - 1) > config.PARABOLIC_MULTIPLIER_TOL:
        raise ClassificationError(
            f"Germ multiplier {lam:.6g} is not 1; pass the germ of the q-fold iterate")
    m = germ_multiplicity(germ)
    return m - 1, to_complex(germ.coefficient(m))


def attraction_directions(germ: GermSeries) -> Tuple[int, List[complex], List[complex]]:
    """n and the unit vectors v with a v^n < 0 (attracting) and a v^n > 0 (repelling)."""
    n, a = leading_term(germ)
    arg_a = cmath.phase(a)
    attracting = [cmath.exp(1j * (math.pi - arg_a + 2 * math.pi * k) / n) for k in range(n)]
    repelling = [cmath.exp(1j * (-arg_a + 2 * math.pi * k) / n) for k in range(n)]
    return n, attracting, repelling


def iterate_germ(germ: GermSeries, k: int) -> GermSeries:
    """Germ of F^k; for u + a u^(n+1) + ... the u^(n+1) coefficient becomes k a."""
    return germ.iterate(k)


def parabolic_germ(f: RationalMap, record: FixedPointRecord, order: int) -> Tuple[LocalIterate, GermSeries, bool]:
    """Local iterate and germ of f^q at a parabolic point with rotation p/q."""
    if not record.is_parabolic:
        raise ClassificationError(f"Point is {record.fixed_class.value}, not parabolic")
    if record.period != 1:
        raise ClassificationError("Petals are built at fixed points; pass the iterate for cycles")
    q = record.rotation_denominator
    g, swap = _centered_map(f, record.location)
    germ = iterate_germ(taylor_germ(g, 0j, order), q)
    return LocalIterate(g, q), germ, swap


# ---------------------------------------------------------------------------
# Petals

@dataclass(frozen=True)
class PetalSpec:
    """One petal in the chart w = B / u^n, B = b = -1/(na) for attracting and -b for repelling.

    The w-image is {|w| > r, Re w > c - |Im w| / tan(2 eps)}; the branch of
    u = (B/w)^(1/n) is pinned to ``direction``.
    """
    index: int
    petal_type: PetalType
    direction: complex
    image_index: int
    n: int
    a: complex
    chart_constant: complex
    epsilon: float
    r: float
    c: float
    margin: float
    local: LocalIterate
    germ: GermSeries
    z_hat: Any
    swap: bool

    @property
    def attracting(self) -> bool:
        return self.petal_type == PetalType.attracting

    def to_local(self, z):
        if self.swap:
            if is_inf(z):
                return 0j
            return INF if z == 0 else 1 / z
        if is_inf(z):
            return INF
        return z - to_complex(self.z_hat)

    def from_local(self, u):
        if self.swap:
            return INF if u == 0 else 1 / u
        return to_complex(self.z_hat) + u

    def to_w(self, u: complex) -> complex:
        return self.chart_constant / u ** self.n

    def from_w(self, w: complex) -> complex:
        t = (abs(self.chart_constant) / abs(w)) ** (1.0 / self.n)
        return self.direction * t * cmath.exp(-1j * cmath.phase(w) / self.n)

    def in_region(self, w: complex) -> bool:
        return abs(w) > self.r and w.real > self.c - abs(w.imag) / math.tan(2 * self.epsilon)

    def contains(self, u) -> bool:
        if is_inf(u) or u == 0 or not cmath.isfinite(u):
            return False
        if abs(cmath.phase(u / self.direction)) >= math.pi / self.n:
            return False
        return self.in_region(self.to_w(u))

    def step(self, u: complex) -> Tuple[complex, complex]:
        """The map under which this petal is attracting: F, or the local inverse of F."""
        return self.local.forward(u) if self.attracting else self.local.backward(u)

    def boundary(self, count: int = 32) -> List[complex]:
        """Local points on the two boundary rays of the w-region, vertex included."""
        angle = math.pi / 2 + 2 * self.epsilon
        length = 20 * self.c
        points = [self.from_w(complex(self.c))]
        for sign in (1, -1):
            ray = cmath.exp(1j * sign * angle)
            for k in range(1, count // 2 + 1):
                points.append(self.from_w(self.c + length * k / (count // 2) * ray))
        return points

    def interior(self, count: int = 16) -> List[complex]:
        points = []
        for j in range(count):
            phi = -(math.pi / 2 + self.epsilon) + (math.pi + 2 * self.epsilon) * j / max(count - 1, 1)
            w = self.c + 4 * self.c * cmath.exp(1j * phi)
            if self.in_region(w):
                points.append(self.from_w(w))
        return points

    def polygon(self, count: int = 32) -> List[Any]:
        """Sampled boundary in the original coordinate."""
        return [self.from_local(u) for u in self.boundary(count)]

    def invariance_holds(self, count: int = 32) -> bool:
        """The petal map sends the sampled closure into the petal or onto the fixed point."""
        for u in self.boundary(count) + self.interior(count):
            image = self.step(u)[0]
            if image != 0 and not self.contains(image):
                return False
        return True


def _certify(step: Callable, chart_constant: complex, n: int, epsilon: float) -> Tuple[float, float]:
    """Smallest doubling radius r with sup |w' - w - 1| < sin(eps) on |w| = r.

    w' - w - 1 is holomorphic in u across 0, so the circle bounds the exterior.
    """
    target = math.sin(epsilon)
    circle = np.exp(2j * np.pi * np.arange(config.PETAL_BOUNDARY_SAMPLES) / config.PETAL_BOUNDARY_SAMPLES)
    r = 1.0
    while r <= config.PETAL_MAX_RADIUS:
        rho = (abs(chart_constant) / r) ** (1.0 / n)
        worst = 0.0
        for e in circle:
            u = rho * complex(e)
            try:
                image = step(u)[0]
            except DynamicsError:
                worst = math.inf
                break
            if image == 0:
                worst = math.inf
                break
            worst = max(worst, abs(chart_constant / image ** n - chart_constant / u ** n - 1))
            if worst >= target:
                break
        if worst < target:
            return r, worst
        r *= 2
    raise CertificateError(f"Could not certify |w' - w - 1| < sin({epsilon:.4g}) up to r = {config.PETAL_MAX_RADIUS:.3g}")


def _image_indices(directions: Sequence[complex], lam: complex) -> List[int]:
    rotated = [lam * v / abs(lam) for v in directions]
    return [min(range(len(directions)), key=lambda j: abs(directions[j] - w)) for w in rotated]


def build_petals(f: RationalMap, record: FixedPointRecord,
                 epsilon: float = config.PETAL_EPSILON) -> List[PetalSpec]:
    """n attracting then n repelling petals at a parabolic fixed point."""
    if not 0 < epsilon < math.pi / 8:
        raise ValueError("Petal angle epsilon must lie in (0, pi/8)")
    n_hint = max(record.multiplicity - 1, 1)
    order = max(config.MULTIPLICITY_ORDER, 4 * n_hint + config.FATOU_SERIES_TERMS + 2)
    local, germ, swap = parabolic_germ(f, record, order)
    n, attracting, repelling = attraction_directions(germ)
    a = leading_term(germ)[1]
    b = -1 / (n * a)
    lam = to_complex(record.multiplier)
    petals: List[PetalSpec] = []
    for kind, directions, constant, step in (
            (PetalType.attracting, attracting, b, local.forward),
            (PetalType.repelling, repelling, -b, local.backward)):
        r, worst = _certify(step, constant, n, epsilon)
        c = r / math.sin(2 * epsilon)
        images = _image_indices(directions, lam)
        logger.debug(f"{kind.value} petals: n={n}, r={r:.4g}, c={c:.4g}, sup|w'-w-1|={worst:.3e}")
        for i, v in enumerate(directions):
            petals.append(PetalSpec(index=i, petal_type=kind, direction=v, image_index=images[i], n=n, a=a,
                                    chart_constant=constant, epsilon=epsilon, r=r, c=c,
                                    margin=math.sin(epsilon) - worst, local=local, germ=germ,
                                    z_hat=record.location, swap=swap))
    delta = (abs(b) / (4 * max(p.c for p in petals))) ** (1.0 / n)
    covered = petal_coverage(petals, delta)
    if covered < 1.0:
        logger.warning(f"Petals cover {covered:.3%} of the punctured disk of radius {delta:.3e}")
    return petals


def petal_coverage(petals: Sequence[PetalSpec], delta: float, rings: int = 12, spokes: int = 360) -> float:
    """Fraction of a polar grid in 0 < |u| < delta that lies in some petal."""
    hits = 0
    total = 0
    for k in range(1, rings + 1):
        radius = delta * k / (rings + 1)
        for j in range(spokes):
            u = radius * cmath.exp(2j * math.pi * (j + 0.5) / spokes)
            total += 1
            if any(p.contains(u) for p in petals):
                hits += 1
    return hits / total


def petal_report(petal: PetalSpec, residual: Optional[float] = None) -> PetalReport:
    return PetalReport(index=petal.index, petal_type=petal.petal_type, direction=petal.direction,
                       image_index=petal.image_index, epsilon=petal.epsilon, inner_radius=petal.r,
                       offset=petal.c, certified_margin=petal.margin, residual=residual)


def petals_equivalent(f: RationalMap, record: FixedPointRecord, epsilon_1: float, epsilon_2: float,
                      samples: int = 16, max_iter: int = config.PETAL_ENTRY_MAX_ITER) -> bool:
    """Orbits from each attracting petal of one family enter the matching petal of the other."""
    first = [p for p in build_petals(f, record, epsilon_1) if p.attracting]
    second = [p for p in build_petals(f, record, epsilon_2) if p.attracting]
    for source, target in ((first, second), (second, first)):
        for petal in source:
            other = target[petal.index]
            for u in petal.interior(samples):
                steps = 0
                while not other.contains(u):
                    if steps >= max_iter:
                        return False
                    u = petal.local.forward(u)[0]
                    steps += 1
    return True


# ---------------------------------------------------------------------------
# Quadrature

def _gauss(fn: Callable[[complex], complex], p: complex, q: complex) -> complex:
    half = (q - p) / 2
    mid = (q + p) / 2
    return half * sum(float(wt) * fn(mid + half * float(x)) for x, wt in zip(_NODES, _WEIGHTS))


def _adaptive(fn: Callable[[complex], complex], p: complex, q: complex,
              whole: Optional[complex] = None, depth: int = 0) -> complex:
    if whole is None:
        whole = _gauss(fn, p, q)
    mid = (p + q) / 2
    left = _gauss(fn, p, mid)
    right = _gauss(fn, mid, q)
    total = left + right
    if abs(total - whole) <= config.QUADRATURE_TOL * max(1.0, abs(total)) or depth >= config.QUADRATURE_MAX_DEPTH:
        return total
    return _adaptive(fn, p, mid, left, depth + 1) + _adaptive(fn, mid, q, right, depth + 1)


# ---------------------------------------------------------------------------
# Formal Abel series

def abel_series(germ: GermSeries, terms: int) -> Tuple[Dict[int, complex], complex]:
    """Coefficients c_k (k = -n..terms, k != 0) and beta of
    alpha(u) = sum c_k u^k + beta log u with alpha(F(u)) = alpha(u) + 1 formally.
    """
    n, a = leading_term(germ)
    top = n + terms
    order = top + n
    if germ.order < order + 1:
        raise DomainError(f"Germ of order {germ.order} is too short for {terms} Abel terms")
    s_coeffs = [0j] * (order + 1)
    for j in range(n, order + 1):
        s_coeffs[j] = to_complex(germ.coefficient(j + 1))
    s = PowerSeries(s_coeffs)
    one_plus = s + 1
    powers = {k: one_plus ** k - 1 for k in range(-n, terms + 1) if k != 0}
    log_series = PowerSeries([0j] * (order + 1))
    s_pow = PowerSeries([1 + 0j] + [0j] * order)
    for j in range(1, order // n + 1):
        s_pow = s_pow * s
        log_series = log_series + s_pow * ((-1) ** (j + 1) / j)
    coeffs: Dict[int, complex] = {}
    beta = 0j
    for m in range(top + 1):
        kstar = m - n
        total = -1 + 0j if m == 0 else 0j
        for k in range(-n, kstar):
            if k != 0:
                total += coeffs[k] * powers[k][m - k]
        if m > n:
            total += beta * log_series[m]
        if kstar == 0:
            beta = -total / a
        else:
            coeffs[kstar] = -total / (kstar * a)
    return coeffs, beta


# ---------------------------------------------------------------------------
# Fatou coordinates

@dataclass(frozen=True)
class FatouChart:
    """Abel coordinate alpha on a petal with alpha(F(z)) = alpha(z) + 1.

    Orbits are pushed by the petal map until Re w >= radius, where a conjugator
    H finishes the job: alpha = sign * (H(u_M) - M). ``method`` selects H:
    "quadrature" uses the two integrated stages, "series" the formal Abel series.
    """
    petal: PetalSpec
    method: str
    radius: float
    laurent: Tuple[Tuple[int, complex], ...]
    beta: complex
    max_iter: int = config.PARABOLIC_MAX_ITER

    @property
    def sign(self) -> int:
        return 1 if self.petal.attracting else -1

    def _log(self, u: complex) -> complex:
        v = self.petal.direction
        return math.log(abs(u)) + 1j * (cmath.phase(v) + cmath.phase(u / v))

    def _terminal(self, u: complex) -> bool:
        return self.petal.contains(u) and self.petal.to_w(u).real >= self.radius

    def _run(self, u: complex) -> Tuple[complex, int, complex]:
        steps = 0
        deriv = 1 + 0j
        while not self._terminal(u):
            if steps >= self.max_iter:
                raise ConvergenceError(f"Orbit did not reach Re w >= {self.radius} after {steps} steps",
                                       iterations=steps)
            if u == 0 or not cmath.isfinite(u):
                raise DomainError("Orbit left the petal")
            u, du = self.petal.step(u)
            deriv *= du
            steps += 1
        return u, steps, deriv

    # stage maps in the w chart
    def _gw(self, w: complex) -> complex:
        return self.petal.to_w(self.petal.step(self.petal.from_w(w))[0])

    def _density(self, w: complex) -> complex:
        """1 / (1 + eta_0(w)) with eta_0(w) = g_0(w) - w - 1."""
        return 1 / (self._gw(w) - w)

    def _displacement(self, t: complex) -> complex:
        """1 + eta_1 at the stage-one image of t."""
        return _gauss(self._density, t, self._gw(t))

    def _stage_two(self, t: complex) -> complex:
        return self._density(t) / self._displacement(t)

    def _conjugator(self, u: complex) -> Tuple[complex, complex]:
        """(H(u), H'(u)) at a terminal point."""
        if self.method == "series":
            value = self.beta * self._log(u)
            deriv = self.beta / u
            for k, ck in self.laurent:
                value += ck * u ** k
                deriv += k * ck * u ** (k - 1)
            # the series is the Abel coordinate of F; the repelling petal needs that of F^-1
            return self.sign * value, self.sign * deriv
        w = self.petal.to_w(u)
        value = _adaptive(self._stage_two, complex(self.radius), w)
        dw_du = -self.petal.n * self.petal.chart_constant / u ** (self.petal.n + 1)
        return value, self._stage_two(w) * dw_du

    def evaluate(self, u: complex) -> Tuple[complex, complex]:
        """(alpha, alpha') at a local point whose petal orbit reaches the terminal half-plane."""
        end, steps, deriv = self._run(u)
        h, dh = self._conjugator(end)
        return self.sign * (h - steps), self.sign * dh * deriv

    def __call__(self, z):
        u = self.petal.to_local(z)
        if not self.petal.contains(u):
            raise DomainError(f"Point {z} is outside the petal")
        return self.evaluate(u)[0]

    def cylinder(self, z) -> complex:
        """Ecalle cylinder coordinate exp(2 pi i alpha), invariant under F."""
        return cmath.exp(2j * math.pi * self(z))

    def inverse_local(self, s: complex) -> complex:
        offset = self.radius if self.method == "quadrature" else 0.0
        u = self.petal.from_w(offset + self.sign * s)
        for _ in range(config.NEWTON_MAX_ITER):
            value, deriv = self.evaluate(u)
            step = (value - s) / deriv
            u -= step
            if abs(step) <= 1e-14 * abs(u):
                break
        value, _ = self.evaluate(u)
        if abs(value - s) > 1e-9 * max(1.0, abs(s)):
            raise ConvergenceError(f"Could not invert the Fatou coordinate at {s:.6g}")
        return u

    def inverse(self, s: complex):
        return self.petal.from_local(self.inverse_local(s))

    def residual(self, points: Sequence[Any]) -> float:
        """sup |alpha(F(z)) - alpha(z) - 1| over points in the original coordinate."""
        worst = 0.0
        for z in points:
            u = self.petal.to_local(z)
            image = self.petal.local.forward(u)[0]
            worst = max(worst, abs(self.evaluate(image)[0] - self.evaluate(u)[0] - 1))
        return worst


def fatou_coordinate(petal: PetalSpec, method: str = "quadrature", radius: Optional[float] = None,
                     max_iter: int = config.PARABOLIC_MAX_ITER) -> FatouChart:
    if method not in ("quadrature", "series"):
        raise ValueError(f"Unknown Fatou method: {method}")
    laurent: Tuple[Tuple[int, complex], ...] = ()
    beta = 0j
    if method == "series":
        n = petal.n
        terms = min(config.FATOU_SERIES_TERMS + 2 * n, petal.germ.order - 1 - 2 * n)
        coeffs, beta = abel_series(petal.germ, terms)
        laurent = tuple(sorted(coeffs.items()))
        default = config.FATOU_SERIES_RADIUS
    else:
        default = config.ABEL_RADIUS
    radius = max(radius if radius is not None else default, 2 * petal.c)
    logger.debug(f"Fatou chart ({method}) on {petal.petal_type.value} petal {petal.index}, radius {radius:.4g}")
    return FatouChart(petal=petal, method=method, radius=radius, laurent=laurent, beta=beta, max_iter=max_iter)


def abel_extend(chart: FatouChart, z0):
    """alpha(z_k) - k for the first k with z_k in the attracting petal."""
    if not chart.petal.attracting:
        raise ClassificationError("Basin extension needs an attracting petal")
    petal = chart.petal
    u = petal.to_local(z0)
    k = 0
    while not petal.contains(u):
        if k >= config.PETAL_ENTRY_MAX_ITER or is_inf(u) or not cmath.isfinite(u) or abs(u) > 1e100:
            raise NotInBasinError(f"Orbit did not enter the petal after {k} steps", iterations=k)
        u = petal.local.forward(u)[0]
        k += 1
    return chart.evaluate(u)[0] - k


def repelling_global(chart: FatouChart, w: complex):
    """beta(w) = F^k(alpha^-1(w - k)) with F(beta(w)) = beta(w + 1)."""
    if chart.petal.attracting:
        raise ClassificationError("Global parametrization needs a repelling petal")
    offset = chart.radius if chart.method == "quadrature" else 0.0
    k = max(0, math.ceil(w.real + chart.radius - offset + 1))
    if k > chart.max_iter:
        raise ConvergenceError(f"Parametrization needs {k} steps, beyond the cap", iterations=k)
    u = chart.inverse_local(w - k)
    for _ in range(k):
        try:
            u = chart.petal.local.forward(u)[0]
        except NotInBasinError:
            return INF
    return chart.petal.from_local(u)


def fatou_report(chart: FatouChart, samples: int = 32) -> ChartReport:
    points = [chart.petal.from_local(u) for u in chart.petal.interior(samples)]
    location = 0j if chart.petal.swap else to_complex(chart.petal.z_hat)
    return ChartReport(kind=ChartKind.fatou, location=location, multiplier=1 + 0j, residual=chart.residual(points), samples=len(points),
                       radius=chart.radius, note=f"{chart.petal.petal_type.value}:{chart.method}")


# ---------------------------------------------------------------------------
# Orbit directions

def direction_of_convergence(f: RationalMap, record: FixedPointRecord, z0,
                             max_iter: int = config.PARABOLIC_MAX_ITER,
                             tol: float = config.DIRECTION_TOL) -> complex:
    """lim u_k / |u_k| along the F-orbit of z0.

    A direction is accepted only after |u_k| has shrunk for DIRECTION_SETTLE_STEPS
    straight steps inside DIRECTION_RADIUS * |a|^(-1/n), the regime where the
    leading term u + a u^(n+1) dominates.
    """
    order = max(config.MULTIPLICITY_ORDER, record.multiplicity + 2)
    local, germ, swap = parabolic_germ(f, record, order)
    n, attracting, _ = attraction_directions(germ)
    _, a = leading_term(germ)
    radius = config.DIRECTION_RADIUS * abs(a) ** (-1.0 / n)
    if swap:
        u = 0j if is_inf(z0) else (INF if z0 == 0 else 1 / z0)
    else:
        u = z0 - to_complex(record.location)
    if is_inf(u) or u == 0:
        raise DomainError("Start point coincides with the parabolic point")
    shrinking = 0
    for k in range(max_iter):
        v = u / abs(u)
        if shrinking >= config.DIRECTION_SETTLE_STEPS and min(abs(v - d) for d in attracting) < tol:
            logger.debug(f"Direction settled after {k} steps")
            return v
        prev = abs(u)
        u = local.forward(u)[0]
        if u == 0 or not cmath.isfinite(u) or abs(u) > 1e6:
            raise ConvergenceError(f"Orbit does not converge to the parabolic point (step {k})", iterations=k)
        shrinking = shrinking + 1 if abs(u) < min(prev, radius) else 0
    raise ConvergenceError(f"Direction did not settle within {max_iter} steps", iterations=max_iter)

