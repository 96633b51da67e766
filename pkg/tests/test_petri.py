import random
from fractions import Fraction

import pytest

from xdelta.errors import PreconditionViolation, UnexpectedKernelDimension, UsageError
from xdelta.exactalg import QuadricVerdict, RationalMatrix, classify_quadric
from xdelta.petri import (
    Polynomial,
    build_model,
    cited_model,
    congruent_modulo_quadric,
    cubic_relations,
    is_trigonal_over_q,
    monomials,
    quadric_multiples,
    quadric_relations,
    quartic_relation,
    reduce_modulo_quadric,
    relation_space,
)
from xdelta.qseries import QSeries, Rigor, validate_basis
from xdelta.zmod import DeltaSubgroup, Level

from .conftest import CUBIC_26, DELTA_26, LEVEL_26, QUADRIC_26


def test_monomials_are_graded_lex():
    assert monomials(3, 2) == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    assert len(monomials(4, 3)) == 20


def test_parse_and_render():
    poly = Polynomial.parse("z^2 - y*z + x*w")
    assert str(poly) == QUADRIC_26
    assert poly.degree == 2
    assert poly.is_homogeneous()
    assert poly.coefficient((0, 1, 1, 0)) == -1


def test_parse_rational_coefficients():
    poly = Polynomial.parse("x^2/2 - 3*y*z")
    assert str(poly) == "1/2*x^2 - 3*y*z"
    assert str(poly.normalized()) == "x^2 - 6*y*z"


@pytest.mark.parametrize("text", ["x^2 + v", "x**", "2*u"])
def test_parse_rejects_bad_input(text):
    with pytest.raises(UsageError):
        Polynomial.parse(text)


def test_polynomial_arithmetic():
    x, y = Polynomial.variable(4, 0), Polynomial.variable(4, 1)
    assert str((x + y) * (x - y)) == "x^2 - y^2"
    assert (x - x).is_zero()
    assert str(Polynomial.from_terms(4, {})) == "0"


def test_to_vector_needs_matching_degree():
    with pytest.raises(UsageError):
        Polynomial.parse("x^2 + y").to_vector(2)


def test_bundled_relations_vanish_on_the_fixture(basis_26):
    assert Polynomial.parse(QUADRIC_26).annihilates(basis_26)
    assert Polynomial.parse(CUBIC_26).annihilates(basis_26)


def test_quadric_from_the_fixture(basis_26):
    assert [str(q) for q in quadric_relations(basis_26)] == [QUADRIC_26]


def test_fixture_model_is_heuristic(basis_26):
    model = build_model(basis_26)
    assert model.rigor is Rigor.HEURISTIC
    assert str(model.quadric_relation) == QUADRIC_26
    assert model.classification().verdict is QuadricVerdict.RULED_OVER_Q
    # ten coefficients leave several cubics modulo the quadric
    assert model.cubic_relation is None
    assert model.relations == (model.quadric_relation,)


def test_short_fixture_keeps_the_reference_cubic(basis_26):
    quadric = Polynomial.parse(QUADRIC_26)
    reference = Polynomial.parse(CUBIC_26)
    shifted = reference + Polynomial.parse("x - 2*w") * quadric
    model = build_model(basis_26, shifted)
    assert model.cubic_from_reference
    assert model.cubic_relation.annihilates(basis_26)
    assert congruent_modulo_quadric(model.cubic_relation, reference, quadric)
    assert str(model.cubic_relation) == str(reduce_modulo_quadric(reference, quadric))


def test_short_fixture_rejects_a_reference_that_does_not_vanish(basis_26):
    quadric = Polynomial.parse(QUADRIC_26)
    assert cubic_relations(basis_26, quadric, Polynomial.parse("x^3")) is None


def test_verified_cubic_ignores_the_reference(verified_basis_26):
    quadric = Polynomial.parse(QUADRIC_26)
    model = build_model(verified_basis_26, Polynomial.parse("x^3"))
    assert not model.cubic_from_reference
    assert congruent_modulo_quadric(model.cubic_relation, Polynomial.parse(CUBIC_26), quadric)


def test_verified_model(verified_basis_26):
    model = build_model(verified_basis_26)
    assert model.rigor is Rigor.VERIFIED
    assert model.kernel_dims == (1, 5)
    assert str(model.quadric_relation) == QUADRIC_26
    quadric = Polynomial.parse(QUADRIC_26)
    assert congruent_modulo_quadric(model.cubic_relation, Polynomial.parse(CUBIC_26), quadric)
    assert is_trigonal_over_q(model)


def _random_invertible(rng: random.Random) -> RationalMatrix:
    while True:
        m = RationalMatrix.from_rows([[rng.randint(-3, 3) for _ in range(4)] for _ in range(4)])
        if m.rank() == 4:
            return m


def test_quadric_verdict_survives_a_change_of_basis(basis_26):
    rng = random.Random(2026)
    for _ in range(200):
        u = _random_invertible(rng)
        forms = [
            sum((u.entries[i][j] * f for j, f in enumerate(basis_26.forms)), QSeries.zero(basis_26.prec))
            for i in range(4)
        ]
        moved = validate_basis(LEVEL_26, DELTA_26, forms, source="moved")
        [quadric] = quadric_relations(moved)
        assert quadric.annihilates(moved)
        assert classify_quadric(quadric.symmetric_form()).verdict is QuadricVerdict.RULED_OVER_Q


def test_cubic_kernel_contains_the_quadric_multiples(verified_basis_26):
    kernel = relation_space(verified_basis_26, 3)
    assert len(kernel) == 5
    for multiple in quadric_multiples(Polynomial.parse(QUADRIC_26)):
        assert multiple.annihilates(verified_basis_26)


def test_reduction_kills_quadric_multiples():
    quadric = Polynomial.parse(QUADRIC_26)
    cubic = Polynomial.parse(CUBIC_26)
    shifted = cubic + Polynomial.parse("3*x - y") * quadric
    assert reduce_modulo_quadric(shifted, quadric) == reduce_modulo_quadric(cubic, quadric)
    assert reduce_modulo_quadric(Polynomial.variable(4, 2) * quadric, quadric).is_zero()


def test_reduction_by_zero_quadric():
    with pytest.raises(UnexpectedKernelDimension):
        reduce_modulo_quadric(Polynomial.parse(CUBIC_26), Polynomial.from_terms(4, {}))


def test_cubic_relations_need_a_nonzero_quadric(verified_basis_26):
    with pytest.raises(UnexpectedKernelDimension):
        cubic_relations(verified_basis_26, Polynomial.from_terms(4, {}))


def _genus3_basis():
    level = Level(24)
    delta = DeltaSubgroup.from_pm(level, (1, 5))
    t = QSeries([0, 1], 30)
    # the plane quartic x^3 z = x y^3 + y^4 on the chart x = 1
    y = t
    z = y ** 3 + y ** 4
    return validate_basis(level, delta, [t, t * y, t * z])


def test_quartic_of_a_genus_three_branch():
    basis = _genus3_basis()
    quartic = quartic_relation(basis)
    assert quartic.degree == 4
    assert quartic.annihilates(basis)
    assert str(quartic) == "x^3*z - x*y^3 - y^4"


def test_genus_three_model_is_trigonal():
    model = build_model(_genus3_basis())
    assert model.genus == 3
    assert model.quadric is None
    assert is_trigonal_over_q(model)


def test_genus_is_checked(verified_basis_26):
    with pytest.raises(PreconditionViolation):
        quartic_relation(verified_basis_26)
    with pytest.raises(PreconditionViolation):
        quadric_relations(_genus3_basis())


def test_cited_model(bundle):
    level = Level(25)
    fact = bundle.genus4_model(level, DeltaSubgroup.from_pm(level, (1, 7)))
    model = cited_model(fact)
    assert model.rigor is Rigor.CITED
    verdict = is_trigonal_over_q(model)
    assert not verdict
    assert verdict.classification.verdict is QuadricVerdict.RULED_OVER_FIELD
    assert verdict.classification.squarefree_disc == 5


def test_cited_cone(bundle):
    level = Level(28)
    model = cited_model(bundle.genus4_model(level, DeltaSubgroup.from_pm(level, (1, 3, 9))))
    verdict = is_trigonal_over_q(model)
    assert verdict
    assert verdict.classification.verdict is QuadricVerdict.CONE_OVER_Q


def test_every_cited_model_has_the_tabulated_verdict(bundle):
    for fact in bundle.genus4_models.values():
        model = cited_model(fact)
        assert model.classification().describe() == fact.verdict
        assert model.cubic_relation.degree == 3


def test_coefficients_survive_parsing():
    poly = Polynomial.parse("2/3*x*y")
    assert poly.coefficient((1, 1, 0, 0)) == Fraction(2, 3)
