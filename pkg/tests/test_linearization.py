import cmath
import math

import numpy as np
import pytest

from dynamics import classify_fixed_point, find_fixed_points
from errors import ClassificationError
from linearization import (
    boettcher_chart,
    chart_report,
    koenigs_chart,
    koenigs_extend,
    linearizing_coefficients,
    max_disk,
    quadratic_family,
    repelling_parametrization,
    spiral_angles,
)
from models.germ import GermSeries
from models.point import INF
from models.rational_map import RationalMap
from schemas.charts import ChartKind
from siegel import eta


def _grid(radius: float, count: int):
    return [radius * (k + 1) / count * cmath.exp(2.4j * k) for k in range(count)]


def test_koenigs_functional_equation(koenigs_map):
    record = classify_fixed_point(koenigs_map, 0j)
    chart = koenigs_chart(koenigs_map, record)
    assert chart.residual(_grid(0.05, 100)) <= 1e-8
    h = 1e-6
    derivative = (chart(h) - chart(-h)) / (2 * h)
    assert derivative == pytest.approx(1, abs=1e-6)


def test_koenigs_charts_agree_after_normalization(koenigs_map):
    record = classify_fixed_point(koenigs_map, 0j)
    series = koenigs_chart(koenigs_map, record)
    plain = koenigs_chart(koenigs_map, record, series_order=1)
    for z in _grid(0.2, 20):
        assert abs(series(z) - plain(z)) <= 1e-7


def test_koenigs_chart_rejects_superattracting(koenigs_map):
    record = classify_fixed_point(koenigs_map, INF)
    with pytest.raises(ClassificationError):
        koenigs_chart(koenigs_map, record)


def test_repelling_chart_report(koenigs_map):
    record = classify_fixed_point(koenigs_map, 0.3 + 0j)
    report = chart_report(koenigs_map, record, samples=40)
    assert report.kind == ChartKind.koenigs
    assert report.residual <= 1e-8


@pytest.mark.parametrize("map_name", ["fig3_map", "fig4_map"])
def test_boettcher_at_infinity(map_name, request):
    f = request.getfixturevalue(map_name)
    record = classify_fixed_point(f, INF)
    chart = boettcher_chart(f, record)
    points = [(4 + 0.1 * k) * cmath.exp(2.4j * k) for k in range(50)]
    assert chart.residual(points) <= 1e-9


def test_boettcher_of_pure_power_is_identity():
    f = quadratic_family(0)
    record = classify_fixed_point(f, INF)
    chart = boettcher_chart(f, record)
    for z in (4 + 0j, -5j, 3 + 3j):
        assert abs(chart(z) - z) <= 1e-12


def test_max_disk_matches_eta():
    for k in range(10):
        lam = (0.2 + 0.06 * k) * cmath.exp(2j * math.pi * (0.1 + 0.083 * k))
        f = quadratic_family(lam)
        record = classify_fixed_point(f, 0j)
        disk = max_disk(f, record, boundary_points=0)
        value = eta(lam)
        assert disk.radius == pytest.approx(abs(value), abs=1e-8)
        assert abs(value) <= 2


def test_max_disk_boundary_is_a_level_set(koenigs_map):
    record = classify_fixed_point(koenigs_map, 0j)
    disk = max_disk(koenigs_map, record, boundary_points=16)
    assert disk.boundary_deviation <= 1e-8
    assert disk.image_inside
    assert abs(disk.critical_point + 0.35) < 1e-12


def test_basin_extension_at_preimage_of_fixed_point(koenigs_map):
    record = classify_fixed_point(koenigs_map, 0j)
    chart = koenigs_chart(koenigs_map, record)
    # -0.7 maps to 0, so phi vanishes there
    assert abs(koenigs_extend(chart, -0.7 + 0j)) <= 1e-12


def test_linearizing_coefficients_first_terms():
    lam = 0.5
    h, numerators, divisors = linearizing_coefficients(GermSeries([lam, 1.0]), 3)
    assert h[2] == pytest.approx(1 / (lam ** 2 - lam))
    assert divisors[3] == pytest.approx(lam ** 3 - lam)


def test_repelling_parametrization_of_square_is_exponential():
    f = RationalMap.polynomial([0, 0, 1])
    chart = koenigs_chart(f, classify_fixed_point(f, 1 + 0j))
    for w in (0.3 + 0.2j, 1 + 1j, -0.5 + 2j, 0.05j):
        psi = repelling_parametrization(chart, w)
        assert psi == pytest.approx(cmath.exp(w), rel=1e-8)
        assert repelling_parametrization(chart, 2 * w) == pytest.approx(psi ** 2, rel=1e-12)


def test_preimages_wind_along_spiral():
    lam = 1.5 * cmath.exp(0.7j)
    f = quadratic_family(lam)
    chart = koenigs_chart(f, classify_fixed_point(f, 0j))
    steps = np.diff(spiral_angles(chart, 0.1, 20))
    assert np.all(steps < 0)
    assert steps[-1] == pytest.approx(-0.7, abs=1e-3)


def test_extended_chart_commutes_with_map(koenigs_map):
    chart = koenigs_chart(koenigs_map, classify_fixed_point(koenigs_map, 0j))
    for z in (-0.8 + 0j, -0.6 + 0.1j, 0.2 + 0.1j, -0.35 + 0.3j):
        phi = koenigs_extend(chart, z)
        assert abs(koenigs_extend(chart, koenigs_map(z)) - 0.7 * phi) <= 1e-8 * max(1, abs(phi))


@pytest.mark.parametrize("coefficients, sign", [([1, 0, 1], 1), ([0.1, 0.2, 0, 1], -1)])
def test_boettcher_branches_differ_by_root_of_unity(coefficients, sign):
    f = RationalMap.polynomial(coefficients)
    record = classify_fixed_point(f, INF)
    first, second = boettcher_chart(f, record, branch=0), boettcher_chart(f, record, branch=1)
    radius = max(first.radius, second.radius)
    for k in range(8):
        z = 2 * radius * cmath.exp(0.8j * k)
        assert second(z) == pytest.approx(sign * first(z), rel=1e-9)


def test_boettcher_lift_respects_branch(fig3_map):
    chart = boettcher_chart(fig3_map, classify_fixed_point(fig3_map, INF))
    sigma = math.log(abs(chart.alpha) * chart.radius) + 0.5
    for t in (-3.0, -1.0, 0.0, 2.5, 3.1):
        big_z = complex(sigma, t)
        shift = chart.lift(big_z + 2j * math.pi) - chart.lift(big_z)
        assert shift == pytest.approx(2j * math.pi * chart.degree, abs=1e-9)
