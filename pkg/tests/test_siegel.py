import cmath
import logging
import math
import random
from fractions import Fraction

import pytest

import config
from arithmetic import GapSchedule, construct_liouville, float_truncation, golden
from dynamics import classify_fixed_point
from errors import ClassificationError, DomainError
from linearization import quadratic_family
from models.germ import GermSeries
from models.polynomial import Polynomial
from models.rational_map import RationalMap
from models.rotation import RotationNumber
from models.surd import QuadraticSurd
from schemas.dynamics import FixedPointClass
from schemas.siegel import ScanVerdict
from siegel import (
    cauchy_riemann_residual,
    convergence_radius_estimate,
    cremer_germ,
    default_radii,
    eta,
    formal_linearization,
    product_identity,
    radial_scan,
    small_cycle_search,
)


def _rotation_map(angle: float):
    return quadratic_family(cmath.exp(2j * math.pi * angle))


def test_exact_gaussian_linearization_has_zero_residual():
    lam = QuadraticSurd.gaussian(Fraction(3, 5), Fraction(4, 5))
    lin = formal_linearization(GermSeries([lam, 1]), 32)
    assert lin.exact
    assert lin.residual == 0
    report = lin.report()
    assert report.order == 32
    assert report.transparency < 1e-9


def test_float_linearization_report():
    lin = formal_linearization(GermSeries([0.5 + 0j, 1]), 10)
    assert not lin.exact
    assert lin.residual < 1e-12
    assert lin.coefficient(2) == pytest.approx(1 / (0.25 - 0.5))


def test_cremer_germ_has_shrinking_radius():
    xi = construct_liouville(GapSchedule.from_prefix([1, 3, 200]))
    germ = cremer_germ(xi, order=64)
    assert all(c in (0, 1) for c in germ.coefficients[1:])
    short = convergence_radius_estimate(formal_linearization(germ, 32))
    full = convergence_radius_estimate(formal_linearization(germ, 64))
    assert full.radius < 1e-3
    assert full.radius < short.radius


def test_product_identity_over_random_multipliers():
    rng = random.Random(3)
    for _ in range(40):
        lam = rng.uniform(0.3, 1.2) * cmath.exp(2j * math.pi * rng.random())
        g = quadratic_family(lam)
        for q in range(1, 6):
            product, expected = product_identity(g, q)
            assert abs(product - expected) <= 1e-8 * abs(expected)


@pytest.mark.slow
def test_truncated_liouville_angle_has_small_cycle():
    angle, terms = float_truncation(construct_liouville(GapSchedule.geometric(20)))
    assert terms == 2
    f = _rotation_map(angle)
    record = classify_fixed_point(f, 0j)
    assert record.fixed_class == FixedPointClass.irrationally_indifferent
    report = small_cycle_search(f, record, q_max=8, delta=0.05, truncation_bits=53)
    assert any(c.period == 2 for c in report.cycles)
    assert all(abs(z) < 0.05 for c in report.cycles for z in c.points)
    for level in report.levels[:2]:
        assert level.product_error <= 1e-8


@pytest.mark.slow
def test_golden_angle_has_no_small_cycles():
    f = _rotation_map(float(golden()))
    report = small_cycle_search(f, classify_fixed_point(f, 0j), q_max=8, delta=0.01)
    assert report.cycles == []


def test_small_cycle_search_rejects_attracting_point(koenigs_map):
    with pytest.raises(ClassificationError):
        small_cycle_search(koenigs_map, classify_fixed_point(koenigs_map, 0j))


def test_eta_domain():
    for lam in (0, 1.0, 1.5j):
        with pytest.raises(DomainError):
            eta(lam)
    assert abs(eta(0.5)) <= 2


def test_radial_scan_of_golden_angle():
    estimate = radial_scan(golden(), radii=default_radii(8), threads=2)
    assert estimate.verdict == ScanVerdict.siegel
    assert len(estimate.samples) == 8
    assert estimate.cauchy_riemann < 1e-4
    assert cauchy_riemann_residual(0.4 * cmath.exp(2j * math.pi * 0.3)) < 1e-4


def test_radial_scan_rejects_bad_schedule():
    with pytest.raises(ValueError):
        radial_scan(golden(), radii=[0.5, 0.4])


def test_resonant_and_rational_inputs():
    with pytest.raises(DomainError):
        cremer_germ(RotationNumber.from_fraction(Fraction(1, 3)))
    with pytest.raises(DomainError):
        formal_linearization(GermSeries([-1 + 0j, 1]), 8)
    with pytest.raises(ValueError):
        formal_linearization(GermSeries([0.5, 1]), 1)


def test_eta_singularity_at_origin_is_removable():
    for k in range(16):
        lam = 1e-3 * cmath.exp(2j * math.pi * k / 16)
        value = eta(lam)
        assert abs(value) < 1e-3
        assert value / lam == pytest.approx(-0.25, abs=1e-3)


def test_eta_does_not_vanish_on_circle():
    for k in range(64):
        assert abs(eta(0.5 * cmath.exp(2j * math.pi * k / 64))) > 0


def test_golden_scan_keeps_eta_away_from_zero():
    estimate = radial_scan(golden(), radii=default_radii(8))
    assert min(s.modulus for s in estimate.samples) > estimate.floor
    assert estimate.flags == []


def test_cauchy_riemann_failure_is_flagged(monkeypatch):
    monkeypatch.setattr(config, "CAUCHY_RIEMANN_TOL", 0.0)
    estimate = radial_scan(golden(), radii=default_radii(4))
    assert "cauchy-riemann" in estimate.flags


def test_liouville_scan_is_never_siegel():
    estimate = radial_scan(construct_liouville(), radii=default_radii(8))
    assert estimate.verdict != ScanVerdict.siegel


def test_rational_map_skips_product_identity(caplog):
    lam = cmath.exp(2j * math.pi * float(golden()))
    f = RationalMap(Polynomial([0, lam, 1]), Polynomial([1, 0, 1]))
    record = classify_fixed_point(f, 0j)
    caplog.set_level(logging.DEBUG, logger="siegel")
    report = small_cycle_search(f, record, q_max=2, delta=0.01)
    assert all(level.product is None for level in report.levels)
    assert "Product identity skipped" in caplog.text
