import cmath
import math

import pytest

from linearization import quadratic_family
from models.polynomial import Polynomial
from models.rational_map import RationalMap

FIG3_C = -0.744336 + 0.121198j
FIG4_C = 0.424513 + 0.207530j


@pytest.fixture
def koenigs_map():
    """z^2 + 0.7z: attracting at 0, repelling at 0.3, superattracting at infinity."""
    return quadratic_family(0.7)


@pytest.fixture
def fig3_map():
    return RationalMap.polynomial([FIG3_C, 0, 1])


@pytest.fixture
def fig4_map():
    return RationalMap.polynomial([FIG4_C, 0, 1])


@pytest.fixture
def parabolic_map():
    """z^2 + z, multiplier 1 at the origin with a single petal pair."""
    return RationalMap.polynomial([0, 1, 1])


@pytest.fixture
def translation_map():
    """z/(1+z), conjugate to w -> w + 1 by w = 1/z."""
    return RationalMap(Polynomial([0, 1]), Polynomial([1, 1]))


@pytest.fixture
def seven_petal_map():
    return quadratic_family(cmath.exp(2j * math.pi * 3 / 7))
