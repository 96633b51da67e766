from functools import lru_cache

import pytest

from xdelta.errors import PreconditionViolation, SetupMismatch
from xdelta.obstructions import (
    DELTA_37,
    EllipticTarget,
    ObstructionReason,
    ObstructionStatus,
    forced_degrees,
    ramification_obstruction,
    ramification_setup,
    ramification_setup_37,
    square_degree_obstruction,
)
from xdelta.zmod import DeltaSubgroup, Level

TARGET_37 = EllipticTarget(label="37a1", conductor=37, rank=1, has_cm=False, isogeny_class_size=1)
TARGET_43 = EllipticTarget(label="43a1", conductor=43, rank=1, has_cm=False, isogeny_class_size=1)


def test_forced_degrees():
    assert forced_degrees(6) == [6]
    assert forced_degrees(12) == [3, 12]
    assert forced_degrees(9) == [9]
    assert forced_degrees(1) == []


def test_non_square_isogeny_degree_37():
    # Delta = {+-1, +-6}: X_1 -> X_Delta of degree 2, X_Delta -> X_0^+ of degree 18
    result = square_degree_obstruction(2, 18, 3, TARGET_37, genus_x1=40)
    assert result.status is ObstructionStatus.OBSTRUCTED
    assert result.reason is ObstructionReason.NON_SQUARE_ISOGENY_DEGREE
    assert result.numerics == {"candidate_degree": 6, "beta_degree": 6}


def test_square_isogeny_degree_is_inconclusive():
    result = square_degree_obstruction(3, 12, 3, TARGET_37, genus_x1=40)
    assert result.status is ObstructionStatus.INCONCLUSIVE
    assert result.reason is ObstructionReason.SQUARE_ISOGENY_DEGREE
    assert result.numerics["beta_degree"] == 4


def test_non_integral_isogeny_degree_43():
    result = square_degree_obstruction(3, 14, 3, TARGET_43, genus_x1=57)
    assert result.obstructed
    assert result.reason is ObstructionReason.NON_INTEGRAL_ISOGENY_DEGREE


def test_larger_delta_at_43():
    result = square_degree_obstruction(7, 6, 3, TARGET_43, genus_x1=57)
    assert result.obstructed
    assert result.numerics == {"candidate_degree": 21, "beta_degree": 2}


def test_optimal_degree_not_forced():
    result = square_degree_obstruction(4, 24, 3, TARGET_37, genus_x1=40)
    assert result.status is ObstructionStatus.INCONCLUSIVE
    assert result.reason is ObstructionReason.OPTIMAL_NOT_FORCED


def test_describe():
    result = square_degree_obstruction(2, 18, 3, TARGET_37, genus_x1=40)
    assert result.describe() == "Obstructed(NonSquareIsogenyDegree): candidate_degree=6, beta_degree=6"


@pytest.mark.parametrize(
    "target, genus_x1",
    [
        (EllipticTarget("27a1", 27, 0, True, 4), 13),
        (EllipticTarget("11a1", 11, 0, False, 3), 1),
        (TARGET_37, 0),
    ],
)
def test_square_degree_preconditions(target, genus_x1):
    with pytest.raises(PreconditionViolation):
        square_degree_obstruction(2, 18, 3, target, genus_x1)


def test_ramification_parity():
    assert ramification_obstruction(3, 2).reason is ObstructionReason.RAMIFICATION_PARITY_VIOLATION
    assert ramification_obstruction(4, 2).reason is ObstructionReason.PARTITION_EXISTS
    with pytest.raises(PreconditionViolation):
        ramification_obstruction(0, 2)


@lru_cache(maxsize=None)
def _uniform_partition_exists(d: int, e: int) -> bool:
    """Brute force: can d be written as a sum of parts all equal to e"""
    if d == 0:
        return True
    return d >= e and _uniform_partition_exists(d - e, e)


@pytest.mark.parametrize("d", range(1, 101))
def test_ramification_matches_brute_force(d):
    for e in range(1, 101):
        result = ramification_obstruction(d, e)
        assert result.obstructed == (not _uniform_partition_exists(d, e)), (d, e)


def test_ramification_setup_37():
    setup = ramification_setup_37()
    assert (setup.genus_x0, setup.fixed_points, setup.deg_pi, setup.deg_alpha) == (2, 2, 6, 4)
    assert setup.deg_g == 12
    assert setup.fiber_points == 6
    assert setup.fiber_index == 2
    assert setup.known_ramification == 12
    assert setup.required_total_ramification == 18
    assert ramification_obstruction(setup.deg_f, setup.required_index).obstructed


def test_ramification_setup_37_checks_its_inputs():
    with pytest.raises(SetupMismatch):
        ramification_setup_37(fixed_points=4)
    with pytest.raises(SetupMismatch, match=r"deg\(alpha\) \* deg\(f\) = 2 \* 3"):
        ramification_setup_37(deg_alpha=2)


def test_ramification_setup_degree_mismatch():
    with pytest.raises(SetupMismatch):
        ramification_setup(Level(37), DELTA_37, deg_f=3, deg_alpha=3)


def test_ramification_setup_needs_elliptic_quotient():
    level = Level(31)
    with pytest.raises(SetupMismatch):
        ramification_setup(level, DeltaSubgroup.from_pm(level, (1, 5, 6)), deg_f=3, deg_alpha=1)
