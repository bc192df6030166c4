import math
import random
from fractions import Fraction

import pytest

from arithmetic import (
    GapSchedule,
    _series_verdict,
    best_approximation_check,
    cf_expand,
    condition_report,
    construct_liouville,
    cremer_schedule,
    cube_root_quarter,
    diophantine_constant,
    float_truncation,
    gauss_shift,
    golden,
    measure_experiment,
    multiplier_error,
    parse_rotation,
)
from errors import DomainError, PrecisionError, ScheduleError
from models.rotation import RotationKind, RotationNumber
from schemas.arithmetic import ConditionName, Verdict

LADDER = (ConditionName.roth, ConditionName.siegel, ConditionName.brjuno, ConditionName.perez_marco)
FIG10B = RotationNumber.from_decimal("0.78705954039469")


def angle_from_quotients(quotients):
    value = Fraction(0)
    for a in reversed(quotients):
        value = 1 / (a + value)
    return RotationNumber.from_fraction(value, label="spike")


def test_golden_expansion_is_all_ones():
    expansion = cf_expand(golden(), 30)
    assert expansion.quotients == (1,) * 30
    fib = [1, 1]
    while len(fib) < 31:
        fib.append(fib[-1] + fib[-2])
    assert list(expansion.q) == fib
    assert not expansion.terminated


def test_rational_expansion_terminates():
    expansion = cf_expand(RotationNumber.from_fraction(Fraction(3, 7)), 10)
    assert expansion.quotients == (2, 3)
    assert expansion.terminated
    assert expansion.convergent(2) == Fraction(3, 7)


@pytest.mark.parametrize("xi", [golden(), cube_root_quarter(), FIG10B])
def test_multiplier_error_between_bounds(xi):
    expansion = cf_expand(xi, 31)
    assert expansion.depth >= 20
    for n in range(1, min(30, expansion.depth)):
        value = multiplier_error(xi, n, expansion)
        q_next = expansion.q[n + 1]
        assert 2 / q_next <= value * (1 + 1e-12)
        assert value <= 2 * math.pi / q_next


def test_multiplier_error_past_rational_end():
    with pytest.raises(DomainError):
        multiplier_error(RotationNumber.from_fraction(Fraction(3, 7)), 2)


def test_convergents_are_best_approximations():
    assert best_approximation_check(golden(), 10 ** 4) == []
    assert best_approximation_check(cube_root_quarter(), 10 ** 4) == []
    assert best_approximation_check(FIG10B, 10 ** 4) == []


def test_golden_conditions():
    report = condition_report(golden(), depth=30)
    assert report.depth == 30
    assert report.verdict(ConditionName.brjuno) == Verdict.holds
    assert report.verdict(ConditionName.siegel) == Verdict.holds
    assert report.verdict(ConditionName.roth) == Verdict.holds
    assert report.verdict(ConditionName.diophantine, 2.5) == Verdict.holds


@pytest.mark.parametrize("depth", [20, 30, 40])
def test_single_large_quotient_is_not_a_certified_failure(depth):
    xi = angle_from_quotients([1] * 7 + [10 ** 10] + [1] * 40)
    report = condition_report(xi, depth=depth, degrees=(2,), kappas=(3.0,))
    for name in LADDER:
        assert report.verdict(name) != Verdict.fails
    assert report.verdict(ConditionName.diophantine, 3.0) != Verdict.fails
    assert report.verdict(ConditionName.brjuno) == Verdict.holds
    assert report.verdict(ConditionName.perez_marco) == Verdict.holds


def test_series_verdict_needs_sustained_growth():
    small = [(n, 2 ** n, 2.0 ** -n) for n in range(12)]
    verdict, _, witness = _series_verdict(small)
    assert verdict == Verdict.holds and witness is None

    spike = list(small)
    spike[9] = (9, 2 ** 9, 40.0)
    assert _series_verdict(spike)[0] == Verdict.holds

    growing = small[:8] + [(n, 2 ** n, 1.0 + n) for n in range(8, 12)]
    verdict, _, witness = _series_verdict(growing)
    assert verdict == Verdict.fails
    assert witness.startswith("terms")

    shrinking = small[:8] + [(n, 2 ** n, 20.0 - n) for n in range(8, 12)]
    assert _series_verdict(shrinking)[0] == Verdict.undecidable


def test_liouville_fails_siegel():
    report = condition_report(construct_liouville())
    siegel = next(r for r in report.records if r.name == ConditionName.siegel)
    assert siegel.verdict == Verdict.fails
    assert siegel.witness.startswith("records")
    assert report.verdict(ConditionName.roth) == Verdict.fails


def test_cremer_tower_meets_cremer_condition():
    report = condition_report(construct_liouville(cremer_schedule()), degrees=(2, 3, 10))
    for d in (2, 3, 10):
        assert report.verdict(ConditionName.cremer, d) == Verdict.holds


def test_ladder_is_consistent_on_random_angles():
    rng = random.Random(7)
    for _ in range(100):
        a, b = rng.getrandbits(600), rng.getrandbits(600)
        if a == b or 0 in (a, b):
            continue
        xi = RotationNumber.from_fraction(Fraction(min(a, b), max(a, b)))
        report = condition_report(xi, depth=20, degrees=(2,), kappas=())
        verdicts = [report.verdict(name) for name in LADDER]
        for i, left in enumerate(verdicts):
            for right in verdicts[i + 1:]:
                if left == Verdict.holds:
                    assert right != Verdict.fails
                if right == Verdict.fails:
                    assert left == Verdict.fails


def test_cube_root_diophantine_constant():
    assert diophantine_constant(cube_root_quarter(), 3.0) >= 1 / 12


def test_measure_experiment():
    finite = measure_experiment(3.0, 0.01, trials=20000, seed=1, q_max=200)
    assert finite.bound_finite
    assert finite.within_bound
    assert finite.estimate <= finite.bound + 3 * finite.sigma
    infinite = measure_experiment(2.0, 0.01, trials=2000, seed=1, q_max=50)
    assert not infinite.bound_finite
    assert infinite.bound is None
    with pytest.raises(ValueError):
        measure_experiment(3.0, 0.0)


def test_schedule_validation():
    with pytest.raises(ScheduleError):
        GapSchedule.from_prefix([3, 3])
    with pytest.raises(ScheduleError):
        GapSchedule.from_prefix([0, 2])
    with pytest.raises(ScheduleError):
        GapSchedule.geometric(1)
    schedule = GapSchedule.geometric(20)
    assert [schedule.exact(k) for k in (1, 2, 3)] == [1, 20, 400]


def test_float_truncation_of_liouville_angle():
    value, terms = float_truncation(construct_liouville(GapSchedule.geometric(20)))
    assert value == pytest.approx(0.5 + 2.0 ** -20, abs=1e-15)
    assert terms == 2


def test_precision_error_carries_partial_expansion():
    with pytest.raises(PrecisionError) as info:
        cf_expand(construct_liouville(), depth=40, precision=10)
    partial = info.value.partial
    assert partial is not None
    assert partial.depth == info.value.depth < 40


def test_gauss_shift():
    assert float(gauss_shift(golden())) == pytest.approx(float(golden()), abs=1e-15)
    assert gauss_shift(RotationNumber.from_fraction(Fraction(3, 7))).exact == Fraction(1, 3)
    with pytest.raises(DomainError):
        gauss_shift(RotationNumber.from_fraction(Fraction(1, 2)))


def test_parse_rotation():
    assert parse_rotation("3/7").exact == Fraction(3, 7)
    assert parse_rotation("golden").kind == RotationKind.surd
    assert parse_rotation("gaps:1,3,200").kind == RotationKind.liouville
    with pytest.raises(ValueError):
        parse_rotation("bogus")
