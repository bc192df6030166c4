import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

import config
from dynamics import escape_bound, find_fixed_points
from errors import DynamicsError
from expression import parse_map
from linearization import koenigs_chart, koenigs_extend, max_disk
from models.point import is_inf, to_complex
from models.rational_map import RationalMap
from parabolic import FatouChart, build_petals, fatou_coordinate
from schemas.dynamics import FixedPointClass
from schemas.render import Overlay, RenderSpec, RenderSummary, RenderWarning

logger = logging.getLogger(__name__)

INTERIOR_SHADE = 192
OVERLAY_SHADE = 255
ESCAPE_STEP = 8
ESCAPE_CEILING = 160
# rational maps have no escape radius; huge moduli count as reaching infinity
RATIONAL_ESCAPE = 1e12


@dataclass(frozen=True)
class ImageBuffer:
    """8-bit grayscale image, row-major from the top-left pixel."""
    width: int
    height: int
    pixels: np.ndarray = field(repr=False, compare=False)

    def to_pgm(self) -> bytes:
        header = f"P5\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + np.ascontiguousarray(self.pixels, dtype=np.uint8).tobytes()

    def write(self, path: str):
        with open(path, "wb") as fh:
            fh.write(self.to_pgm())
        logger.info(f"Wrote {self.width}x{self.height} image to {path}")


@dataclass(frozen=True)
class RenderResult:
    spec: RenderSpec
    image: ImageBuffer
    interior: np.ndarray = field(repr=False, compare=False)
    level_field: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    marks: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    warnings: List[RenderWarning] = field(default_factory=list)

    def summary(self, path: Optional[str] = None) -> RenderSummary:
        return RenderSummary(name=self.spec.name, expression=self.spec.expression, path=path,
                             width=self.image.width, height=self.image.height, overlay=self.spec.overlay,
                             interior_fraction=float(self.interior.mean()),
                             overlay_pixels=int(self.marks.sum()) if self.marks is not None else 0,
                             warnings=len(self.warnings))


def pixel_grid(spec: RenderSpec) -> np.ndarray:
    """Complex coordinates of pixel centers, top row first."""
    size = spec.pixel_size
    cols = (np.arange(spec.pixels) + 0.5 - spec.pixels / 2) * size
    rows = (np.arange(spec.rows) + 0.5 - spec.rows / 2) * size
    return spec.center + cols[None, :] - 1j * rows[:, None]


def _vector_map(f: RationalMap) -> Callable[[np.ndarray], np.ndarray]:
    num = np.array([complex(c) for c in f.numerator.coefficients[::-1]])
    den = np.array([complex(c) for c in f.denominator.coefficients[::-1]])

    def apply(z: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            return np.polyval(num, z) / np.polyval(den, z)
    return apply


def _attractors(f: RationalMap) -> List[complex]:
    try:
        records = find_fixed_points(f)
    except DynamicsError as e:
        logger.warning(f"No attracting shortcut: {e.detail}")
        return []
    return [to_complex(r.location) for r in records
            if not is_inf(r.location)
            and r.fixed_class in (FixedPointClass.attracting, FixedPointClass.superattracting)]


def _escape_row(apply, z: np.ndarray, radius: float, attractors: Sequence[complex],
                max_iter: int):
    """(shade, interior) for one row: escape count, or bounded/attracted orbit."""
    count = np.full(z.shape, -1)
    alive = np.ones(z.shape, dtype=bool)
    interior = np.zeros(z.shape, dtype=bool)
    z = z.copy()
    for n in range(max_iter):
        z[alive] = apply(z[alive])
        with np.errstate(invalid="ignore"):
            escaped = alive & ~(np.abs(z) <= radius)
        count[escaped] = n
        alive &= ~escaped
        for a in attractors:
            near = alive & (np.abs(z - a) < config.ATTRACTING_SHORTCUT)
            interior |= near
            alive &= ~near
        if not alive.any():
            break
    interior |= alive
    shade = np.where(interior, INTERIOR_SHADE, np.minimum(ESCAPE_CEILING, ESCAPE_STEP * np.maximum(count, 0)))
    return shade.astype(np.uint8), interior


def _crossings(level_field: np.ndarray) -> np.ndarray:
    """Pixels where floor(field) differs from the right or lower neighbor."""
    band = np.floor(level_field)
    marks = np.zeros(level_field.shape, dtype=bool)
    with np.errstate(invalid="ignore"):
        horizontal = (band[:, :-1] != band[:, 1:]) & np.isfinite(band[:, :-1]) & np.isfinite(band[:, 1:])
        vertical = (band[:-1, :] != band[1:, :]) & np.isfinite(band[:-1, :]) & np.isfinite(band[1:, :])
    marks[:, :-1] |= horizontal
    marks[:-1, :] |= vertical
    return marks


# ---------------------------------------------------------------------------
# Overlay fields

def _koenigs_field(f: RationalMap) -> Callable[[complex], float]:
    """s(z) with integer values on |phi(z)| = |phi(omega) / lam^n|."""
    record = next((r for r in find_fixed_points(f)
                   if r.fixed_class == FixedPointClass.attracting and not is_inf(r.location)), None)
    if record is None:
        raise DynamicsError("Map has no finite attracting fixed point with nonzero multiplier")
    chart = koenigs_chart(f, record)
    disk = max_disk(f, record, boundary_points=0)
    base = math.log(disk.radius)
    gap = -math.log(abs(chart.multiplier))

    def level(z: complex) -> float:
        value = koenigs_extend(chart, z)
        if value == 0:
            return -math.inf
        return (math.log(abs(value)) - base) / gap
    return level


def _fatou_field(f: RationalMap, cap: int) -> Callable[[complex], float]:
    """Re alpha(z) for points whose orbit enters an attracting petal."""
    record = next((r for r in find_fixed_points(f) if r.is_parabolic and r.period == 1), None)
    if record is None:
        raise DynamicsError("Map has no parabolic fixed point")
    charts: List[FatouChart] = [fatou_coordinate(p, method="series")
                                for p in build_petals(f, record) if p.attracting]
    local = charts[0].petal

    def level(z: complex) -> float:
        u = local.to_local(z)
        for k in range(cap):
            if is_inf(u) or not cmath.isfinite(u) or abs(u) > 1e100:
                break
            for chart in charts:
                if chart.petal.contains(u):
                    return (chart.evaluate(u)[0] - k).real
            u = local.local.forward(u)[0]
        return math.nan
    return level


def _petal_field(f: RationalMap) -> Callable[[complex], float]:
    record = next((r for r in find_fixed_points(f) if r.is_parabolic and r.period == 1), None)
    if record is None:
        raise DynamicsError("Map has no parabolic fixed point")
    petals = build_petals(f, record)

    def level(z: complex) -> float:
        u = petals[0].to_local(z)
        for j, petal in enumerate(petals):
            if petal.contains(u):
                return float(j + 1)
        return 0.0
    return level


def _overlay_level(spec: RenderSpec, f: RationalMap) -> Callable[[complex], float]:
    if spec.overlay == Overlay.koenigs_levels:
        return _koenigs_field(f)
    if spec.overlay == Overlay.fatou_levels:
        return _fatou_field(f, 10 * spec.max_iter)
    return _petal_field(f)


# ---------------------------------------------------------------------------
# Rendering

def render_julia(spec: RenderSpec, threads: int = config.THREADS) -> RenderResult:
    """Escape-time shading with an optional chart overlay; rows are rendered in parallel."""
    f = parse_map(spec.expression).map
    grid = pixel_grid(spec)
    apply = _vector_map(f)
    if f.is_polynomial():
        radius = max(spec.escape_radius, escape_bound(f.as_polynomial()))
    else:
        radius = RATIONAL_ESCAPE
    attractors = _attractors(f)
    workers = max(1, threads)

    def escape_row(j: int):
        return _escape_row(apply, grid[j], radius, attractors, spec.max_iter)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(escape_row, range(spec.rows)))
    pixels = np.vstack([shade for shade, _ in rows])
    interior = np.vstack([inside for _, inside in rows])

    warnings: List[RenderWarning] = []
    level_field = marks = None
    if spec.overlay != Overlay.none:
        try:
            level = _overlay_level(spec, f)
            level_field = _overlay_field(level, grid, interior, spec.overlay, workers)
            marks = _crossings(level_field)
            pixels = np.where(marks, OVERLAY_SHADE, pixels).astype(np.uint8)
        except DynamicsError as e:
            logger.warning(f"Overlay {spec.overlay.value} skipped: {e.detail}")
            warnings.append(RenderWarning(overlay=spec.overlay, detail=e.detail))
            level_field = marks = None
    image = ImageBuffer(spec.pixels, spec.rows, pixels)
    logger.debug(f"Rendered {spec.pixels}x{spec.rows}, interior fraction {interior.mean():.3f}")
    return RenderResult(spec, image, interior, level_field, marks, warnings)


def _overlay_field(level: Callable[[complex], float], grid: np.ndarray, interior: np.ndarray,
                   overlay: Overlay, workers: int) -> np.ndarray:
    # petals are drawn everywhere; level families only on the basin
    everywhere = overlay == Overlay.petals

    def field_row(j: int) -> np.ndarray:
        out = np.full(grid.shape[1], np.nan)
        for i, z in enumerate(grid[j]):
            if not (everywhere or interior[j, i]):
                continue
            try:
                out[i] = level(complex(z))
            except DynamicsError:
                continue
        return out

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.vstack(list(pool.map(field_row, range(grid.shape[0]))))
