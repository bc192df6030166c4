import cmath
import math

import pytest

from dynamics import classify_fixed_point, find_periodic_points
from errors import ClassificationError, ConvergenceError
from models.germ import GermSeries
from models.point import is_inf
from models.rational_map import RationalMap
from parabolic import (
    abel_extend,
    attraction_directions,
    build_petals,
    direction_of_convergence,
    fatou_coordinate,
    fatou_report,
    iterate_germ,
    petal_coverage,
    petal_report,
    petals_equivalent,
    repelling_global,
)
from schemas.charts import ChartKind, PetalType


@pytest.fixture
def translation_petals(translation_map):
    record = classify_fixed_point(translation_map, 0j)
    return record, build_petals(translation_map, record)


def test_directions_of_simple_germ():
    n, attracting, repelling = attraction_directions(GermSeries([1, 1]))
    assert n == 1
    assert attracting[0] == pytest.approx(-1)
    assert repelling[0] == pytest.approx(1)


def test_translation_map_has_one_petal_of_each_kind(translation_petals):
    _, petals = translation_petals
    assert [p.petal_type for p in petals] == [PetalType.attracting, PetalType.repelling]
    assert petals[0].direction == pytest.approx(1)
    assert all(p.margin > 0 for p in petals)
    assert all(p.invariance_holds() for p in petals)


def test_petals_cover_punctured_disk(translation_petals):
    _, petals = translation_petals
    delta = (abs(petals[0].chart_constant) / (4 * max(p.c for p in petals))) ** (1.0 / petals[0].n)
    assert petal_coverage(petals, delta) == 1.0


@pytest.mark.parametrize("method", ["quadrature", "series"])
def test_fatou_coordinate_of_translation_is_reciprocal(translation_petals, method):
    # 1/F(u) = 1/u + 1 exactly, so alpha(u) - 1/u is constant
    _, petals = translation_petals
    chart = fatou_coordinate(petals[0], method=method)
    offsets = [chart.evaluate(u)[0] - 1 / u for u in petals[0].interior(8)]
    assert offsets
    for value in offsets:
        assert value == pytest.approx(offsets[0], abs=1e-7)


@pytest.mark.parametrize("method", ["quadrature", "series"])
def test_fatou_report_residual(parabolic_map, method):
    record = classify_fixed_point(parabolic_map, 0j)
    for petal in build_petals(parabolic_map, record):
        report = fatou_report(fatou_coordinate(petal, method=method))
        assert report.kind == ChartKind.fatou
        assert report.residual <= 1e-6


def test_abel_extension_shifts_by_one(parabolic_map):
    record = classify_fixed_point(parabolic_map, 0j)
    attracting = [p for p in build_petals(parabolic_map, record) if p.attracting]
    chart = fatou_coordinate(attracting[0])
    z = -0.3 + 0.05j
    assert abel_extend(chart, parabolic_map(z)) - abel_extend(chart, z) == pytest.approx(1, abs=1e-7)


def test_orbit_converges_along_attracting_direction(parabolic_map):
    record = classify_fixed_point(parabolic_map, 0j)
    v = direction_of_convergence(parabolic_map, record, -0.1 + 0.01j)
    assert abs(v + 1) < 1e-3
    v = direction_of_convergence(parabolic_map, record, 0.1j)
    assert abs(v + 1) < 1e-3


def test_escaping_orbit_has_no_direction(parabolic_map):
    record = classify_fixed_point(parabolic_map, 0j)
    with pytest.raises(ConvergenceError):
        direction_of_convergence(parabolic_map, record, -5 + 0j)


def test_cubic_germ_converges_along_imaginary_axis():
    f = RationalMap.polynomial([0, 1, 0, 1])
    record = classify_fixed_point(f, 0j)
    v = direction_of_convergence(f, record, 0.1 * cmath.exp(0.3j))
    assert abs(v - 1j) < 1e-3


@pytest.mark.parametrize("coefficients, n", [([1, 0.5 + 0.25j, 0.3], 1), ([1, 0, 2, 0.7], 2)])
def test_iterate_adds_leading_coefficient(coefficients, n):
    germ = GermSeries(coefficients)
    a = coefficients[n]
    for k in range(1, 6):
        assert iterate_germ(germ, k).coefficient(n + 1) == pytest.approx(k * a, abs=1e-12)


def test_fatou_methods_agree_up_to_constant(parabolic_map):
    record = classify_fixed_point(parabolic_map, 0j)
    petal = next(p for p in build_petals(parabolic_map, record) if p.attracting)
    quadrature = fatou_coordinate(petal, method="quadrature")
    series = fatou_coordinate(petal, method="series")
    points = petal.interior(8)
    offsets = [quadrature.evaluate(u)[0] - series.evaluate(u)[0] for u in points]
    for value in offsets:
        assert value == pytest.approx(offsets[0], abs=1e-6)


def test_fatou_image_contains_half_plane(parabolic_map):
    record = classify_fixed_point(parabolic_map, 0j)
    petal = next(p for p in build_petals(parabolic_map, record) if p.attracting)
    chart = fatou_coordinate(petal)
    for s in (1 + 0j, 3 + 5j, 10 - 20j, 40 + 100j, 2 - 300j):
        u = chart.inverse_local(s)
        assert petal.contains(u)
        assert chart.evaluate(u)[0] == pytest.approx(s, abs=1e-8 * max(1, abs(s)))


def test_cylinder_coordinate_is_invariant(parabolic_map):
    record = classify_fixed_point(parabolic_map, 0j)
    petal = next(p for p in build_petals(parabolic_map, record) if p.attracting)
    chart = fatou_coordinate(petal)
    for z in (petal.from_local(u) for u in petal.interior(6)):
        before, after = chart.cylinder(z), chart.cylinder(parabolic_map(z))
        assert abs(after - before) <= 1e-6 * abs(before)


def test_repelling_parametrization_conjugates_to_translation(parabolic_map):
    record = classify_fixed_point(parabolic_map, 0j)
    petal = next(p for p in build_petals(parabolic_map, record) if not p.attracting)
    chart = fatou_coordinate(petal)
    for w in (-5 + 0.2j, -2.5 - 0.4j, -1 + 0.1j, 0.5 + 0.3j):
        z = repelling_global(chart, w)
        assert not is_inf(z)
        assert abs(parabolic_map(z) - repelling_global(chart, w + 1)) <= 1e-8 * max(1, abs(z))


def test_no_small_cycles_near_parabolic_point(parabolic_map):
    record = classify_fixed_point(parabolic_map, 0j)
    petals = build_petals(parabolic_map, record)
    delta = (abs(petals[0].chart_constant) / (4 * max(p.c for p in petals))) ** (1.0 / petals[0].n)
    for q in range(2, 6):
        for cycle in find_periodic_points(parabolic_map, q):
            if cycle.period == 1:
                continue
            for z in cycle.cycle or [cycle.location]:
                assert is_inf(z) or abs(z) > delta


def test_seven_petals(seven_petal_map):
    record = classify_fixed_point(seven_petal_map, 0j)
    petals = build_petals(seven_petal_map, record)
    assert len(petals) == 14
    assert all(p.n == 7 for p in petals)
    attracting = [p for p in petals if p.attracting]
    assert len(attracting) == 7
    # multiplication by lam permutes the petals cyclically
    assert sorted(p.image_index for p in attracting) == list(range(7))
    assert all(p.image_index != p.index for p in attracting)
    report = petal_report(attracting[0])
    assert report.certified_margin > 0


def test_petal_families_are_equivalent(translation_map):
    record = classify_fixed_point(translation_map, 0j)
    assert petals_equivalent(translation_map, record, math.pi / 16, math.pi / 10)


def test_petal_errors(koenigs_map, parabolic_map):
    with pytest.raises(ClassificationError):
        build_petals(koenigs_map, classify_fixed_point(koenigs_map, 0j))
    with pytest.raises(ValueError):
        build_petals(parabolic_map, classify_fixed_point(parabolic_map, 0j), epsilon=math.pi / 4)
    record = classify_fixed_point(parabolic_map, 0j)
    with pytest.raises(ValueError):
        fatou_coordinate(build_petals(parabolic_map, record)[0], method="euler")
