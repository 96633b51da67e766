import pytest

from xdelta.errors import NonUnitGenerator, UsageError
from xdelta.zmod import (
    DeltaSubgroup,
    Level,
    delta_index,
    enumerate_delta_subgroups,
    parse_residues,
    pm_one,
    proper_delta_subgroups,
    subgroup_closure,
    units,
)


def test_units_of_twelve():
    assert units(Level(12)) == [1, 5, 7, 11]


def test_units_of_one_is_empty():
    assert units(Level(1)) == []
    assert pm_one(Level(1)) == (0,)


def test_level_must_be_positive():
    with pytest.raises(UsageError):
        Level(0)


def test_closure_adds_minus_one():
    delta = subgroup_closure(Level(37), [10])
    assert delta.residues == (1, 10, 11, 26, 27, 36)
    assert delta.order == 6
    assert delta.label == "{±1, ±10, ±11}"


def test_closure_rejects_non_units():
    with pytest.raises(NonUnitGenerator) as excinfo:
        subgroup_closure(Level(26), [13])
    assert excinfo.value.generator == 13
    assert excinfo.value.modulus == 26


def test_from_pm_validates_closure():
    with pytest.raises(UsageError):
        DeltaSubgroup.from_pm(Level(37), (1, 6, 10))


def test_delta_must_contain_minus_one():
    with pytest.raises(UsageError):
        DeltaSubgroup(Level(13), (1, 3, 9))


def test_enumeration_of_thirteen():
    residues = [d.residues for d in enumerate_delta_subgroups(Level(13))]
    assert residues == [
        (1, 12),
        (1, 5, 8, 12),
        (1, 3, 4, 9, 10, 12),
        tuple(range(1, 13)),
    ]


def test_enumeration_of_cyclic_group_counts_even_divisors():
    # (Z/37Z)^x is cyclic of order 36; subgroups containing -1 have even order
    orders = [d.order for d in enumerate_delta_subgroups(Level(37))]
    assert orders == [2, 4, 6, 12, 18, 36]


@pytest.mark.parametrize("n", [14, 18, 22, 23])
def test_no_proper_delta(n):
    assert proper_delta_subgroups(Level(n)) == []


@pytest.mark.parametrize("n", range(1, 13))
def test_no_proper_delta_below_thirteen(n):
    assert proper_delta_subgroups(Level(n)) == []


PROPER_IN_S = {
    13: [(1, 5), (1, 3, 4)],
    15: [(1, 4)],
    16: [(1, 7)],
    17: [(1, 4), (1, 2, 4, 8)],
    19: [(1, 7, 8)],
    20: [(1, 9)],
    21: [(1, 8), (1, 4, 5)],
    24: [(1, 5), (1, 7), (1, 11)],
    25: [(1, 7), (1, 4, 6, 9, 11)],
    26: [(1, 5), (1, 3, 9)],
    27: [(1, 8, 10)],
    28: [(1, 13), (1, 3, 9)],
    29: [(1, 12), (1, 4, 5, 6, 7, 9, 13)],
    31: [(1, 5, 6), (1, 2, 4, 8, 15)],
    32: [(1, 15), (1, 7, 9, 15)],
    34: [(1, 13), (1, 9, 13, 15)],
    36: [(1, 17), (1, 11, 13)],
    37: [(1, 6), (1, 10, 11), (1, 6, 8, 10, 11, 14), (1, 3, 4, 7, 9, 10, 11, 12, 16)],
    43: [(1, 6, 7), (1, 2, 4, 8, 11, 16, 21)],
    45: [(1, 19), (1, 14, 16), (1, 8, 17, 19), (1, 4, 11, 14, 16, 19)],
    49: [(1, 18, 19), (1, 6, 8, 13, 15, 20, 22)],
    50: [(1, 7), (1, 9, 11, 19, 21)],
    54: [(1, 17, 19)],
    64: [(1, 31), (1, 15, 17, 31), (1, 7, 9, 15, 17, 23, 25, 31)],
    81: [(1, 26, 28), (1, 8, 10, 17, 19, 26, 28, 35, 37)],
}


@pytest.mark.parametrize("n", sorted(PROPER_IN_S))
def test_proper_subgroups_in_order(n):
    level = Level(n)
    expected = [DeltaSubgroup.from_pm(level, reps) for reps in PROPER_IN_S[n]]
    assert proper_delta_subgroups(level) == expected
    assert [delta_index(d) for d in expected] == list(range(1, len(expected) + 1))


def test_delta_index_of_improper_group_is_zero():
    level = Level(26)
    assert delta_index(subgroup_closure(level, [])) == 0


def test_parse_residues_accepts_full_list_and_representatives():
    level = Level(37)
    full = parse_residues(level, "1,10,11,26,27,36")
    short = parse_residues(level, "1, 10, 11")
    assert full == short
    assert str(full) == "1,10,11,26,27,36"


@pytest.mark.parametrize("text", ["", "1,a", "1,,x"])
def test_parse_residues_rejects_garbage(text):
    with pytest.raises(UsageError):
        parse_residues(Level(37), text)


def test_parse_residues_rejects_non_units():
    with pytest.raises(NonUnitGenerator):
        parse_residues(Level(26), "1,2")


def test_membership_uses_residue_classes():
    delta = DeltaSubgroup.from_pm(Level(26), (1, 5))
    assert 31 in delta
    assert -5 in delta
    assert 3 not in delta
