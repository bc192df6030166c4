from fractions import Fraction

import numpy as np
import pytest

from dynamics import (
    cancel_common_roots,
    classify_fixed_point,
    find_fixed_points,
    find_periodic_points,
    iterate,
    periodic_roots,
    rational_rotation,
    taylor_germ,
    germ_multiplicity,
)
from errors import ClassificationError, DegreeOverflowError
from models.point import INF, is_inf
from models.polynomial import Polynomial
from models.rational_map import RationalMap
from schemas.dynamics import FixedPointClass
from roots import aberth, horner_evaluator, merge_clusters, newton_polish, polynomial_roots, root_radius


def test_fixed_points_of_koenigs_map(koenigs_map):
    records = find_fixed_points(koenigs_map)
    assert [r.fixed_class for r in records] == [
        FixedPointClass.attracting, FixedPointClass.repelling, FixedPointClass.superattracting]
    assert abs(records[0].location) < 1e-12
    assert records[0].multiplier == pytest.approx(0.7)
    assert records[1].location == pytest.approx(0.3)
    assert records[1].multiplier == pytest.approx(1.3)
    assert is_inf(records[2].location)
    assert records[2].local_degree == 2


def test_parabolic_point_carries_rotation_and_multiplicity(seven_petal_map):
    record = classify_fixed_point(seven_petal_map, 0j)
    assert record.is_parabolic
    assert record.rotation == Fraction(3, 7)
    assert record.multiplicity == 8


def test_seventh_iterate_germ_has_multiplicity_eight(seven_petal_map):
    germ = taylor_germ(seven_petal_map, 0j, 16).iterate(7)
    assert germ.multiplier == pytest.approx(1)
    assert germ_multiplicity(germ) == 8


def test_classify_rejects_non_fixed_point(koenigs_map):
    with pytest.raises(ClassificationError):
        classify_fixed_point(koenigs_map, 1.0)


def test_period_two_cycle_of_basilica():
    f = RationalMap.polynomial([-1, 0, 1])
    records = find_periodic_points(f, 2)
    cycles = [r for r in records if r.period == 2]
    assert len(cycles) == 1
    assert cycles[0].fixed_class == FixedPointClass.superattracting
    assert sorted(abs(z) for z in cycles[0].cycle) == pytest.approx([0.0, 1.0], abs=1e-9)


def test_periodic_roots_count_includes_infinity(koenigs_map):
    roots = periodic_roots(koenigs_map, 3)
    assert len(roots) == 2 ** 3 + 1
    assert sum(1 for z in roots if is_inf(z)) == 1


def test_periodic_roots_degree_cap(koenigs_map):
    with pytest.raises(DegreeOverflowError):
        periodic_roots(koenigs_map, 9)


def test_iterate_reports_escape(fig3_map):
    trace = iterate(fig3_map, 3.0, 10)
    assert trace.escaped
    assert trace.escape_index == 1
    bounded = iterate(fig3_map, 0j, 20)
    assert not bounded.escaped
    assert len(bounded.points) == 21


def test_rational_rotation_detects_root_of_unity():
    import cmath
    import math
    frac, xi, err = rational_rotation(cmath.exp(2j * math.pi * 2 / 5))
    assert frac == Fraction(2, 5)
    assert err < 1e-12


def test_cancel_common_roots():
    f = RationalMap(Polynomial([-1, 0, 1]), Polynomial([-1, 1]))
    g, removed = cancel_common_roots(f)
    assert len(removed) == 1
    assert removed[0] == pytest.approx(1)
    assert g.degree == 1


def test_polynomial_roots_with_origin_multiplicity():
    roots = polynomial_roots(Polynomial([0, 0, -1, 1]))
    clusters = merge_clusters(roots)
    assert (0j, 2) in clusters
    assert any(abs(z - 1) < 1e-12 and m == 1 for z, m in clusters)


def test_newton_polish_sharpens_rough_roots():
    exact = np.array([1, 2, -3j])
    evaluate = horner_evaluator(np.poly(exact)[::-1])
    polished = newton_polish(evaluate, exact + 1e-6 * (1 + 1j))
    assert np.max(np.abs(polished - exact)) < 1e-12

    double = horner_evaluator(np.poly([1, 1, 2])[::-1])
    start = np.array([1 + 1e-4, 1 - 1e-4j, 2.0001])
    out = newton_polish(double, start)
    assert np.all(np.abs(double(out)[0]) <= np.abs(double(start)[0]))


def test_stalled_aberth_returns_polished_roots():
    coeffs = np.poly([1, 2, -3j])[::-1]
    roots = aberth(horner_evaluator(coeffs), 3, root_radius(coeffs), tol=0.0)
    for target in (1, 2, -3j):
        assert np.min(np.abs(roots - target)) < 1e-12
