"""
Canonical models from a basis of cusp forms

For a non-hyperelliptic curve of genus 4 the canonical image in P^3 is cut
out by a unique quadric and a cubic (unique modulo linear multiples of the
quadric); in genus 3 it is a plane quartic. Relations are found as kernels
of monomial coefficient matrices over Q.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Sequence, Tuple

from sympy import Poly, Rational, Symbol
from sympy.core.sympify import SympifyError
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.polyerrors import PolynomialError

from .errors import (
    HyperellipticOrLowPrecision,
    PreconditionViolation,
    UnexpectedKernelDimension,
    UsageError,
)
from .exactalg import (
    QuadricClassification,
    QuadricVerdict,
    RationalMatrix,
    SymmetricForm,
    classify_quadric,
    kernel_basis,
    normalize_integer_vector,
)
from .qseries import CuspFormBasis, QSeries, Rigor, monomial_eval

if TYPE_CHECKING:
    from .facts import Genus4ModelFact

logger = logging.getLogger(__name__)

VARIABLES = ("x", "y", "z", "w")

Exponents = Tuple[int, ...]


def monomials(nvars: int, degree: int) -> List[Exponents]:
    """Exponent vectors of the given degree in graded-lex order (x^2, xy, xz, ...)"""
    result = []
    for combo in combinations_with_replacement(range(nvars), degree):
        exps = [0] * nvars
        for i in combo:
            exps[i] += 1
        result.append(tuple(exps))
    return result


# =========================
# Polynomials
# =========================

@dataclass(frozen=True)
class Polynomial:
    """
    A polynomial over Q in x, y, z(, w)

    Terms map exponent vectors to nonzero coefficients. Terms are kept in
    graded-lex order so rendering and normalization are deterministic.
    """
    nvars: int
    terms: Tuple[Tuple[Exponents, Fraction], ...]

    @classmethod
    def from_terms(cls, nvars: int, terms: Mapping[Exponents, object]) -> "Polynomial":
        cleaned: Dict[Exponents, Fraction] = {}
        for exps, coeff in terms.items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise UsageError(f"Exponent vector {exps} does not have {nvars} entries")
            value = cleaned.get(exps, Fraction(0)) + Fraction(coeff)
            cleaned[exps] = value
        ordered = sorted(
            ((e, c) for e, c in cleaned.items() if c != 0),
            key=lambda item: (-sum(item[0]), tuple(-x for x in item[0])),
        )
        return cls(nvars, tuple(ordered))

    @classmethod
    def from_vector(cls, nvars: int, degree: int, vector: Sequence) -> "Polynomial":
        return cls.from_terms(nvars, dict(zip(monomials(nvars, degree), vector)))

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Polynomial":
        exps = [0] * nvars
        exps[index] = 1
        return cls.from_terms(nvars, {tuple(exps): 1})

    @classmethod
    def parse(cls, text: str, nvars: int = 4) -> "Polynomial":
        """Parse text such as "x^2*z - x*y^2 + 2*y^2*z" in the first nvars of x, y, z, w"""
        symbols = [Symbol(v) for v in VARIABLES[:nvars]]
        local = {str(s): s for s in symbols}
        try:
            expr = parse_expr(
                text,
                local_dict=local,
                transformations=standard_transformations + (convert_xor,),
            )
            unknown = expr.free_symbols - set(symbols)
            if unknown:
                raise UsageError(
                    f"Unknown variable(s) {', '.join(sorted(map(str, unknown)))} in {text!r}"
                )
            poly = Poly(expr, *symbols, domain="QQ")
        except (SympifyError, SyntaxError, TypeError, PolynomialError) as e:
            raise UsageError(f"Could not parse polynomial {text!r}: {e}")
        terms = {}
        for exps, coeff in poly.terms():
            r = Rational(coeff)
            terms[tuple(exps)] = Fraction(int(r.p), int(r.q))
        return cls.from_terms(nvars, terms)

    @property
    def as_dict(self) -> Dict[Exponents, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e, _ in self.terms}) <= 1

    def coefficient(self, exps: Exponents) -> Fraction:
        return self.as_dict.get(tuple(exps), Fraction(0))

    def to_vector(self, degree: int) -> Tuple[Fraction, ...]:
        if not self.is_zero() and (not self.is_homogeneous() or self.degree != degree):
            raise UsageError(f"{self} is not homogeneous of degree {degree}")
        coeffs = self.as_dict
        return tuple(coeffs.get(m, Fraction(0)) for m in monomials(self.nvars, degree))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        merged = self.as_dict
        for e, c in other.terms:
            merged[e] = merged.get(e, Fraction(0)) + c
        return Polynomial.from_terms(self.nvars, merged)

    def __neg__(self) -> "Polynomial":
        return Polynomial.from_terms(self.nvars, {e: -c for e, c in self.terms})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return Polynomial.from_terms(self.nvars, {e: c * other for e, c in self.terms})
        product: Dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                product[e] = product.get(e, Fraction(0)) + c1 * c2
        return Polynomial.from_terms(self.nvars, product)

    def __rmul__(self, other) -> "Polynomial":
        return self.__mul__(other)

    def normalized(self) -> "Polynomial":
        """Integer coefficients with content 1, leading term positive"""
        if self.is_zero():
            return self
        ints = normalize_integer_vector([c for _, c in self.terms])
        return Polynomial(self.nvars, tuple((e, Fraction(c)) for (e, _), c in zip(self.terms, ints)))

    def symmetric_form(self) -> SymmetricForm:
        return SymmetricForm.from_polynomial(self.nvars, self.as_dict)

    def evaluate(self, basis: CuspFormBasis) -> QSeries:
        """The q-series obtained by substituting the basis forms for the variables"""
        total = QSeries.zero(basis.prec)
        for exps, coeff in self.terms:
            total = total + monomial_eval(basis, exps) * coeff
        return total

    def annihilates(self, basis: CuspFormBasis) -> bool:
        return self.evaluate(basis).is_zero()

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for exps, coeff in self.terms:
            factors = []
            for var, e in zip(VARIABLES, exps):
                if e == 1:
                    factors.append(var)
                elif e > 1:
                    factors.append(f"{var}^{e}")
            magnitude = abs(coeff)
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = f"{magnitude}*" + "*".join(factors)
            if not pieces:
                pieces.append(("-" if coeff < 0 else "") + body)
            else:
                pieces.append(("- " if coeff < 0 else "+ ") + body)
        return " ".join(pieces)


# =========================
# Coefficient matrices
# =========================

def coefficient_matrix(basis: CuspFormBasis, degree: int) -> Tuple[RationalMatrix, List[Exponents]]:
    """Rows are q^0..q^prec, columns the degree-d monomials in the basis forms"""
    monos = monomials(len(basis.forms), degree)
    columns = [monomial_eval(basis, m).coeffs for m in monos]
    rows = [[col[k] for col in columns] for k in range(basis.prec + 1)]
    return RationalMatrix.from_rows(rows, len(monos)), monos


def relation_space(basis: CuspFormBasis, degree: int) -> List[Polynomial]:
    """All degree-d relations among the forms, as normalized polynomials"""
    matrix, _ = coefficient_matrix(basis, degree)
    nvars = len(basis.forms)
    return [Polynomial.from_vector(nvars, degree, v) for v in kernel_basis(matrix)]


def _require_genus(basis: CuspFormBasis, genus: int, operation: str):
    if len(basis.forms) != genus:
        raise PreconditionViolation(
            f"{operation} needs a genus-{genus} basis; N={basis.level.n}, delta={basis.delta} "
            f"has {len(basis.forms)} forms"
        )


def quadric_relations(basis: CuspFormBasis) -> List[Polynomial]:
    """
    The quadrics through the canonical image of a genus-4 curve

    At verified precision exactly one quadric is expected; more means the
    curve is hyperelliptic (or the input is not a canonical basis).
    """
    _require_genus(basis, 4, "quadric_relations")
    relations = relation_space(basis, 2)
    rigor = basis.rigor(2)
    where = f"N={basis.level.n}, delta={basis.delta}, prec {basis.prec}"
    if not relations:
        raise HyperellipticOrLowPrecision(f"No quadric vanishes on the basis ({where})")
    if len(relations) != 1:
        if rigor is Rigor.VERIFIED:
            raise HyperellipticOrLowPrecision(
                f"Quadric kernel has dimension {len(relations)} at verified precision ({where})"
            )
        logger.warning(
            "Quadric kernel has dimension %d below the Sturm bound (%s); using the first relation",
            len(relations), where,
        )
    logger.debug("Quadrics for %s: %s", where, ", ".join(str(r) for r in relations))
    return relations


def quadric_multiples(quadric: Polynomial) -> List[Polynomial]:
    """x*Q, y*Q, z*Q, w*Q"""
    return [Polynomial.variable(quadric.nvars, i) * quadric for i in range(quadric.nvars)]


def reduce_modulo_quadric(cubic: Polynomial, quadric: Polynomial) -> Polynomial:
    """
    Canonical representative of a cubic modulo the linear multiples of the quadric

    Coordinates at the pivot columns of the reduced echelon form of
    {x*Q, y*Q, z*Q, w*Q} are cleared; the result is normalized.
    """
    if quadric.is_zero():
        raise UnexpectedKernelDimension("Cannot reduce modulo the zero quadric")
    rows = [m.to_vector(3) for m in quadric_multiples(quadric)]
    reduced, pivots = RationalMatrix.from_rows(rows).rref()
    vector = list(cubic.to_vector(3))
    for r, c in enumerate(pivots):
        factor = vector[c]
        if factor:
            vector = [v - factor * p for v, p in zip(vector, reduced.entries[r])]
    return Polynomial.from_vector(cubic.nvars, 3, vector).normalized()


def congruent_modulo_quadric(a: Polynomial, b: Polynomial, quadric: Polynomial) -> bool:
    """True when a and b agree up to a scalar modulo the linear multiples of the quadric"""
    return reduce_modulo_quadric(a, quadric) == reduce_modulo_quadric(b, quadric)


def _cubic_residuals(kernel: Sequence[Polynomial], quadric: Polynomial) -> Tuple[List[Polynomial], int]:
    residuals = [r for r in (reduce_modulo_quadric(k, quadric) for k in kernel) if not r.is_zero()]
    rank = RationalMatrix.from_rows([r.to_vector(3) for r in residuals], 20).rank() if residuals else 0
    return residuals, rank


def cubic_relations(
    basis: CuspFormBasis, quadric: Polynomial, reference: Optional[Polynomial] = None
) -> Optional[Polynomial]:
    """
    The cubic of a genus-4 canonical model, reduced modulo the quadric

    At verified precision the cubic is unique modulo the quadric. Below the
    Sturm bound several cubics can survive; the reference cubic is then
    returned when it vanishes on the basis, and None otherwise.
    """
    _require_genus(basis, 4, "cubic_relations")
    if quadric.is_zero():
        raise UnexpectedKernelDimension("The quadric is the zero polynomial")

    kernel = relation_space(basis, 3)
    residuals, residual_rank = _cubic_residuals(kernel, quadric)

    where = f"N={basis.level.n}, delta={basis.delta}, prec {basis.prec}"
    rigor = basis.rigor(3)
    if residual_rank == 0:
        raise UnexpectedKernelDimension(f"No cubic beyond the quadric multiples ({where})")
    if rigor is Rigor.VERIFIED and (len(kernel) != 5 or residual_rank != 1):
        raise UnexpectedKernelDimension(
            f"Cubic kernel has dimension {len(kernel)} with {residual_rank} new relation(s) "
            f"at verified precision ({where}); expected 5 and 1"
        )
    if residual_rank == 1:
        return residuals[0]

    if reference is not None and reference.annihilates(basis):
        chosen = reduce_modulo_quadric(reference, quadric)
        if not chosen.is_zero():
            logger.info(
                "%d independent cubics modulo the quadric below the Sturm bound (%s); "
                "keeping the reference cubic %s",
                residual_rank, where, chosen,
            )
            return chosen
    logger.warning(
        "%d independent cubics modulo the quadric below the Sturm bound (%s); cubic left undetermined",
        residual_rank, where,
    )
    return None


def quartic_relation(basis: CuspFormBasis) -> Polynomial:
    """The plane quartic of a non-hyperelliptic genus-3 curve"""
    _require_genus(basis, 3, "quartic_relation")
    relations = relation_space(basis, 4)
    where = f"N={basis.level.n}, delta={basis.delta}, prec {basis.prec}"
    if not relations:
        raise UnexpectedKernelDimension(f"No quartic vanishes on the basis ({where})")
    if len(relations) != 1:
        if basis.rigor(4) is Rigor.VERIFIED:
            raise UnexpectedKernelDimension(
                f"Quartic kernel has dimension {len(relations)} at verified precision ({where})"
            )
        logger.warning(
            "Quartic kernel has dimension %d below the Sturm bound (%s); using the first relation",
            len(relations), where,
        )
    return relations[0]


# =========================
# Models
# =========================

@dataclass(frozen=True)
class PetriModel:
    genus: int
    relations: Tuple[Polynomial, ...]
    rigor: Rigor
    quadric: Optional[SymmetricForm] = None
    source: str = ""
    kernel_dims: Tuple[int, ...] = field(default=())
    cubic_from_reference: bool = False

    @property
    def quadric_relation(self) -> Optional[Polynomial]:
        return next((r for r in self.relations if r.degree == 2), None)

    @property
    def cubic_relation(self) -> Optional[Polynomial]:
        return next((r for r in self.relations if r.degree == 3), None)

    def classification(self) -> Optional[QuadricClassification]:
        return classify_quadric(self.quadric) if self.quadric is not None else None


def _weaker(a: Rigor, b: Rigor) -> Rigor:
    return Rigor.HEURISTIC if Rigor.HEURISTIC in (a, b) else a


def build_model(basis: CuspFormBasis, reference_cubic: Optional[Polynomial] = None) -> PetriModel:
    """
    Canonical model of a genus 3 or 4 curve from its cusp forms

    reference_cubic settles the cubic when the fixture is too short to single
    it out; it is ignored whenever the computed cubic is unique.
    """
    genus = len(basis.forms)
    if genus == 4:
        quadric = quadric_relations(basis)[0]
        cubic_kernel = relation_space(basis, 3)
        unique = _cubic_residuals(cubic_kernel, quadric)[1] == 1
        cubic = cubic_relations(basis, quadric, reference_cubic)
        relations = (quadric,) if cubic is None else (cubic, quadric)
        model = PetriModel(
            genus=4,
            relations=relations,
            rigor=_weaker(basis.rigor(2), basis.rigor(3)),
            quadric=quadric.symmetric_form(),
            source=basis.source,
            kernel_dims=(len(relation_space(basis, 2)), len(cubic_kernel)),
            cubic_from_reference=cubic is not None and not unique,
        )
    elif genus == 3:
        quartic = quartic_relation(basis)
        model = PetriModel(
            genus=3,
            relations=(quartic,),
            rigor=basis.rigor(4),
            source=basis.source,
            kernel_dims=(len(relation_space(basis, 4)),),
        )
    else:
        raise PreconditionViolation(
            f"Canonical models are built for genus 3 and 4 only; N={basis.level.n}, "
            f"delta={basis.delta} has genus {genus}"
        )
    logger.info(
        "Model for N=%d delta=%s (%s): %s",
        basis.level.n, basis.delta, model.rigor.value, "; ".join(str(r) for r in model.relations),
    )
    return model


def cited_model(fact: "Genus4ModelFact") -> PetriModel:
    """A genus-4 model taken from a bundled record rather than computed"""
    cubic = Polynomial.parse(fact.cubic)
    quadric = Polynomial.parse(fact.quadric)
    return PetriModel(
        genus=4,
        relations=(cubic, quadric),
        rigor=Rigor.CITED,
        quadric=quadric.symmetric_form(),
        source=fact.citation,
    )


@dataclass(frozen=True)
class TrigonalityVerdict:
    trigonal: bool
    reason: str
    classification: Optional[QuadricClassification] = None

    def __bool__(self) -> bool:
        return self.trigonal


def is_trigonal_over_q(model: PetriModel) -> TrigonalityVerdict:
    if model.genus == 3:
        return TrigonalityVerdict(
            True, "plane quartic: projection from a rational cusp has degree 3"
        )
    if model.genus != 4 or model.quadric is None:
        raise PreconditionViolation(f"Trigonality is decided for genus 3 and 4 only, got {model.genus}")

    cls = model.classification()
    if cls.verdict is QuadricVerdict.RULED_OVER_Q:
        return TrigonalityVerdict(True, "quadric is a ruled surface over Q", cls)
    if cls.verdict is QuadricVerdict.CONE_OVER_Q:
        return TrigonalityVerdict(True, "quadric is a cone over Q", cls)
    if cls.verdict is QuadricVerdict.RULED_OVER_FIELD:
        return TrigonalityVerdict(
            False, f"rulings are defined over Q(sqrt({cls.squarefree_disc})) only", cls
        )
    return TrigonalityVerdict(False, f"degenerate quadric of rank {cls.rank}", cls)
