import cmath
import math

import numpy as np
import pytest
from pydantic import ValidationError

from dynamics import classify_fixed_point, escape_bound, iterate
from expression import parse_map
from linearization import koenigs_chart, koenigs_extend, max_disk
from parabolic import build_petals
from presets import complex_literal, figure_preset, preset_names
from render import ESCAPE_CEILING, INTERIOR_SHADE, OVERLAY_SHADE, _petal_field, pixel_grid, render_julia
from schemas.render import Overlay, RenderSpec

FIG3 = "z^2-.744336+.121198i"


def test_pgm_header_and_size():
    result = render_julia(RenderSpec(expression=FIG3, width=3.2, pixels=32, height=24, max_iter=200))
    data = result.image.to_pgm()
    header = b"P5\n32 24\n255\n"
    assert data.startswith(header)
    assert len(data) == len(header) + 32 * 24


def test_write_pgm(tmp_path):
    result = render_julia(RenderSpec(expression=FIG3, pixels=16, max_iter=50))
    path = tmp_path / "julia.pgm"
    result.image.write(str(path))
    assert path.read_bytes() == result.image.to_pgm()


def test_pixel_grid_is_centered():
    spec = RenderSpec(expression=FIG3, center=0.5 - 0.25j, width=2.0, pixels=20)
    grid = pixel_grid(spec)
    assert grid.shape == (20, 20)
    assert grid.mean() == pytest.approx(0.5 - 0.25j)
    # top row has the largest imaginary part
    assert grid[0, 0].imag > grid[-1, 0].imag


def test_render_is_independent_of_thread_count():
    spec = RenderSpec(expression=FIG3, width=3.2, pixels=40, max_iter=300)
    single = render_julia(spec, threads=1)
    pooled = render_julia(spec, threads=4)
    assert np.array_equal(single.image.pixels, pooled.image.pixels)


def test_escaped_pixels_really_escape():
    spec = RenderSpec(expression=FIG3, width=3.2, pixels=24, max_iter=300)
    result = render_julia(spec)
    f = parse_map(FIG3).map
    radius = max(spec.escape_radius, escape_bound(f.as_polynomial()))
    grid = pixel_grid(spec)
    escaped = ~result.interior
    assert escaped.any()
    assert (result.image.pixels[escaped] <= ESCAPE_CEILING).all()
    assert (result.image.pixels[result.interior] == INTERIOR_SHADE).all()
    for z in grid[escaped][::7]:
        assert iterate(f, complex(z), spec.max_iter, radius).escaped


def test_koenigs_levels_overlay():
    result = render_julia(figure_preset("fig5", pixels=48))
    assert result.warnings == []
    assert result.marks is not None and result.marks.any()
    assert (result.image.pixels[result.marks] == OVERLAY_SHADE).all()
    summary = result.summary("fig5.pgm")
    assert summary.overlay == Overlay.koenigs_levels
    assert summary.overlay_pixels == int(result.marks.sum())


def test_overlay_on_wrong_map_is_a_warning():
    spec = RenderSpec(expression="z^2+0.7*z", pixels=16, overlay=Overlay.petals, max_iter=100)
    result = render_julia(spec)
    assert len(result.warnings) == 1
    assert result.warnings[0].overlay == Overlay.petals
    assert result.marks is None
    assert result.summary().warnings == 1


def test_seven_petal_overlay(seven_petal_map):
    result = render_julia(figure_preset("fig8", pixels=32))
    assert result.warnings == []
    assert result.level_field is not None
    record = classify_fixed_point(seven_petal_map, 0j)
    level = _petal_field(seven_petal_map)
    for petal in build_petals(seven_petal_map, record)[:7]:
        for u in petal.interior(6):
            assert level(petal.from_local(u)) == petal.index + 1


def test_fatou_levels_overlay():
    spec = RenderSpec(**{**figure_preset("fig9", pixels=24).model_dump(), "max_iter": 300})
    result = render_julia(spec)
    assert result.warnings == []
    assert np.isfinite(result.level_field).any()


def test_presets():
    assert preset_names() == ["fig3", "fig4", "fig5", "fig8", "fig9", "fig10a", "fig10b"]
    f = parse_map(figure_preset("fig4").expression).map
    assert list(f.numerator.coefficients) == pytest.approx([0.424513 + 0.207530j, 0, 1])
    spec = figure_preset("fig10a", pixels=64)
    assert spec.pixels == 64
    assert spec.name == "fig10a"
    with pytest.raises(KeyError):
        figure_preset("fig99")
    with pytest.raises(ValidationError):
        figure_preset("fig3", pixels=8)


def test_complex_literal_parses():
    text = complex_literal(0.5 - 0.25j)
    assert text == "(0.5-0.25i)"
    assert parse_map(f"z^2+{text}*z").map(1) == pytest.approx(1.5 - 0.25j)


def test_render_spec_validation():
    for bad in ({"width": 0}, {"pixels": 4}, {"max_iter": 0}, {"escape_radius": -1}):
        with pytest.raises(ValidationError):
            RenderSpec(expression=FIG3, **bad)


@pytest.mark.slow
@pytest.mark.parametrize("name", preset_names())
def test_preset_images_are_byte_identical(name):
    spec = RenderSpec(**{**figure_preset(name, pixels=24).model_dump(), "max_iter": 200})
    first = render_julia(spec, threads=1).image.to_pgm()
    assert render_julia(spec, threads=1).image.to_pgm() == first
    assert render_julia(spec, threads=3).image.to_pgm() == first


def test_koenigs_levels_match_independent_chart(koenigs_map):
    result = render_julia(figure_preset("fig5", pixels=48))
    field = result.level_field
    record = classify_fixed_point(koenigs_map, 0j)
    plain = koenigs_chart(koenigs_map, record, series_order=1)
    base = math.log(max_disk(koenigs_map, record, boundary_points=0).radius)
    gap = -math.log(0.7)
    grid = pixel_grid(result.spec)
    checked = 0
    for j, i in list(zip(*np.nonzero(result.marks)))[::5]:
        s = field[j, i]
        independent = (math.log(abs(koenigs_extend(plain, complex(grid[j, i])))) - base) / gap
        assert independent == pytest.approx(s, abs=1e-4)
        for nj, ni in ((j, i + 1), (j + 1, i)):
            if nj >= field.shape[0] or ni >= field.shape[1] or not np.isfinite(field[nj, ni]):
                continue
            other = field[nj, ni]
            if math.floor(other) != math.floor(s) and abs(other - s) <= 0.5:
                crossed = max(math.floor(s), math.floor(other))
                assert abs(independent - crossed) <= 0.5
                checked += 1
    assert checked > 0


def test_seven_petal_field_is_sevenfold_symmetric(seven_petal_map):
    record = classify_fixed_point(seven_petal_map, 0j)
    petal = next(p for p in build_petals(seven_petal_map, record) if p.attracting)
    level = _petal_field(seven_petal_map)
    steps = 60
    agree = total = 0
    for u in petal.interior(6):
        radius = abs(petal.from_local(u))
        inside = [level(radius * cmath.exp(2j * math.pi * k / (7 * steps))) > 0 for k in range(7 * steps)]
        assert any(inside)
        for k in range(7 * steps):
            agree += inside[k] == inside[(k + steps) % (7 * steps)]
            total += 1
    assert agree / total >= 0.95
