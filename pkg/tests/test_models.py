from fractions import Fraction

import pytest

from models.germ import GermSeries
from models.point import INF, is_inf
from models.polynomial import Polynomial
from models.power_series import PowerSeries
from models.rational_map import RationalMap
from models.rotation import ContinuedFractionExpansion, RotationNumber
from models.surd import QuadraticSurd


def test_polynomial_arithmetic_trims_and_composes():
    p = Polynomial([1, 2, 0, 0])
    assert p.degree == 1
    assert (p * p).coefficients == (1, 4, 4)
    assert p.compose(Polynomial([0, 0, 1])).coefficients == (1, 0, 2)
    assert Polynomial([0, 0, 1]).shift(1).coefficients == (1, 2, 1)
    value, deriv = Polynomial([1, 0, 3]).eval_with_derivative(2)
    assert (value, deriv) == (13, 12)


def test_power_series_inverse_and_compose():
    s = PowerSeries([1, -1, 0, 0, 0])
    inv = s.inverse()
    assert inv.coefficients == (1, 1, 1, 1, 1)
    z = PowerSeries.variable(4)
    square = PowerSeries([0, 0, 1, 0, 0])
    assert square.compose(z + z * z).coefficients == (0, 0, 1, 2, 1)
    with pytest.raises(ValueError):
        s.compose(s)


def test_power_series_truncates_to_lower_order():
    a = PowerSeries([1, 1, 1])
    b = PowerSeries([1, 1])
    assert (a + b).order == 1


def test_surd_arithmetic_is_exact():
    lam = QuadraticSurd.gaussian(Fraction(3, 5), Fraction(4, 5))
    assert lam * lam.conjugate() == 1
    assert (lam ** 2) == QuadraticSurd.gaussian(Fraction(-7, 25), Fraction(24, 25))
    assert abs(abs(lam) - 1) < 1e-15
    with pytest.raises(ValueError):
        QuadraticSurd(1, 1, 4)


def test_surd_enclosure_contains_value():
    golden = QuadraticSurd(Fraction(-1, 2), Fraction(1, 2), 5)
    lo, hi = golden.enclosure(100)
    assert lo <= hi
    assert hi - lo <= Fraction(1, 2 ** 100)
    assert float(lo) == pytest.approx(0.6180339887498949)


def test_rational_map_iterate_and_swap():
    f = RationalMap.polynomial([0, 0, 1])
    assert f.iterate(3).numerator.degree == 8
    assert is_inf(f(INF))
    g = RationalMap(Polynomial([0, 1]), Polynomial([1, 1]))
    assert g(0) == 0
    assert g.compose(g)(1.0) == pytest.approx(1 / 3)
    assert f.swapped()(0) == 0


def test_rational_map_rejects_degree_zero():
    with pytest.raises(ValueError):
        RationalMap(Polynomial([1]), Polynomial([2]))


def test_germ_iterate_and_coefficients():
    germ = GermSeries([1, 1, 0, 0])
    twice = germ.iterate(2)
    assert twice.coefficients[:2] == (1, 2)
    assert germ.coefficient(1) == 1
    with pytest.raises(Exception):
        germ.coefficient(9)


def test_expansion_convergents():
    expansion = ContinuedFractionExpansion.from_quotients([1, 1, 1, 1, 1])
    assert expansion.q == (1, 1, 2, 3, 5, 8)
    assert expansion.convergent(5) == Fraction(5, 8)


def test_rotation_from_fraction_is_exact():
    xi = RotationNumber.from_fraction(Fraction(3, 7))
    assert not xi.irrational
    assert xi.enclose(10) == (Fraction(3, 7), Fraction(3, 7))
    assert float(xi) == pytest.approx(3 / 7)
