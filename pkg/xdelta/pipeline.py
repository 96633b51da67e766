"""
Decision procedure: is the set of cubic points on X_Delta(N) infinite?

Rules fire in a fixed order; each one records the computed values and the
imported facts (with citations) it relied on.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from .config import config
from .cosets import covering_degrees, gamma1_invariants, invariants_of
from .errors import ClassificationIntegrityFailure, PreconditionViolation, UnclassifiedCase, UsageError
from .exactalg import QuadricVerdict
from .facts import EllipticCurveFact, FactsBundle, GonalityClass, JacobianRank, positive_rank_curves
from .obstructions import (
    DELTA_37,
    ObstructionResult,
    RamificationSetup,
    ramification_obstruction,
    ramification_setup,
    ramification_setup_37,
    square_degree_obstruction,
)
from .petri import PetriModel, build_model, cited_model, congruent_modulo_quadric, is_trigonal_over_q
from .qseries import FixtureIndex, Rigor
from .zmod import DeltaSubgroup, Level, delta_index, proper_delta_subgroups

logger = logging.getLogger(__name__)

# Imported results the rules lean on
CITE_LEVEL_SET = "Jeon 2021, Theorem 0.1"
CITE_RATIONAL_CUSP = "Ishii-Momose 1991, Lemma 1.2; Jeon-Kim-Schweizer 2020, Lemma 1.1"
CITE_HYPERELLIPTIC = "Jeon 2021, Lemmas 2.6 and 2.7"
CITE_PLANE_QUARTIC = "Hasegawa-Shimura 1999, p. 136"
CITE_GENUS4_SURFACE = "Hasegawa-Shimura 1999, p. 131"
CITE_NOT_TRIGONAL_OVER_Q = "Jeon 2021, p. 352"
CITE_BIELLIPTIC = "Jeon-Kim-Schweizer 2004, Theorem 1.2"
CITE_MAP_TO_ELLIPTIC = "Jeon 2021, Lemma 1.2"
CITE_OPTIMAL = "Stevens 1989, Proposition 1.4"
CITE_UNRAMIFIED = "Jeon-Kim-Schweizer 2020, Lemma 2.4"


class Verdict(str, Enum):
    INFINITE = "Infinite"
    FINITE = "Finite"


class Reason(str, Enum):
    LEVEL_NOT_IN_S = "LevelNotInS"
    GENUS_AT_MOST_ONE = "GenusAtMostOne"
    TRIGONAL_GENUS_3 = "TrigonalGenus3"
    TRIGONAL_GENUS_4_QUADRIC = "TrigonalGenus4Quadric"
    HYPERELLIPTIC_RANK_ZERO = "HyperellipticRankZero"
    NOT_TRIGONAL_OVER_Q_RANK_ZERO = "NotTrigonalOverQRankZero"
    BIELLIPTIC_RANK_ZERO = "BiellipticRankZero"
    NO_POSITIVE_RANK_CURVE = "NoPositiveRankCurve"
    SQUARE_DEGREE_OBSTRUCTION = "SquareDegreeObstruction"
    RAMIFICATION_OBSTRUCTION = "RamificationObstruction"


INFINITE_REASONS = {Reason.GENUS_AT_MOST_ONE, Reason.TRIGONAL_GENUS_3, Reason.TRIGONAL_GENUS_4_QUADRIC}


class EvidenceKind(str, Enum):
    COMPUTED = "computed"
    CITED = "cited"


class EvidenceStep(BaseModel):
    step: str
    kind: EvidenceKind
    detail: str
    citation: Optional[str] = None


class Decision(BaseModel):
    """Verdict on the cubic points of one curve X_Delta(N), with its evidence trail"""

    level: int
    delta: List[int]
    delta_label: str
    delta_index: int = Field(description="1-based position among the proper subgroups at this level")
    genus: int
    verdict: Verdict
    reason: Reason
    reason_detail: Optional[str] = None
    rigor: Optional[Rigor] = None
    evidence: List[EvidenceStep] = Field(default_factory=list)

    @model_validator(mode="after")
    def _verdict_matches_reason(self) -> "Decision":
        infinite = self.reason in INFINITE_REASONS
        if infinite != (self.verdict is Verdict.INFINITE):
            raise ValueError(f"verdict {self.verdict.value} contradicts reason {self.reason.value}")
        return self

    @property
    def reason_text(self) -> str:
        if self.reason_detail:
            return f"{self.reason.value}({self.reason_detail})"
        return self.reason.value


class _Trail:
    """Accumulates evidence for one decision"""

    def __init__(self):
        self.steps: List[EvidenceStep] = []

    def computed(self, step: str, detail: str):
        self.steps.append(EvidenceStep(step=step, kind=EvidenceKind.COMPUTED, detail=detail))

    def cited(self, step: str, detail: str, citation: str):
        self.steps.append(
            EvidenceStep(step=step, kind=EvidenceKind.CITED, detail=detail, citation=citation)
        )


def _check_scope(level: Level, delta: DeltaSubgroup):
    if delta.level != level:
        raise UsageError(f"Delta is a subgroup modulo {delta.level.n}, not {level.n}")
    if delta.is_trivial or delta.is_full:
        raise PreconditionViolation(
            f"Delta = {delta.label} modulo {level.n} must lie strictly between {{±1}} and the unit group"
        )


def _genus4_model(
    level: Level, delta: DeltaSubgroup, bundle: FactsBundle, fixtures: Optional[FixtureIndex], trail: _Trail
) -> PetriModel:
    """Canonical model from a fixture when one exists, else the bundled one"""
    fact = bundle.genus4_model(level, delta)
    basis = fixtures.get(level, delta) if fixtures is not None else None
    if basis is None:
        if fact is None:
            raise UnclassifiedCase(f"No fixture and no bundled model for N={level.n}, delta={delta.label}")
        model = cited_model(fact)
        trail.cited("model", f"quadric {model.quadric_relation}; cubic {model.cubic_relation}", fact.citation)
        return model

    bundled_model = cited_model(fact) if fact is not None else None
    model = build_model(basis, bundled_model.cubic_relation if bundled_model is not None else None)
    cubic = model.cubic_relation if model.cubic_relation is not None else "undetermined below the Sturm bound"
    trail.computed(
        "model",
        f"from {basis.source} (prec {basis.prec}, {model.rigor.value}): "
        f"quadric {model.quadric_relation}; cubic {cubic}",
    )
    if model.cubic_from_reference:
        trail.cited(
            "cubic",
            f"several cubics vanish through q^{basis.prec}; kept the bundled cubic, which is among them",
            fact.citation,
        )
    if model.rigor is Rigor.HEURISTIC:
        logger.warning(
            "Model for N=%d delta=%s rests on %d coefficients, below the Sturm bound",
            level.n, delta, basis.prec,
        )
    if bundled_model is not None:
        bundled = bundled_model.classification()
        computed = model.classification()
        if bundled.describe() != computed.describe():
            raise ClassificationIntegrityFailure(
                f"N={level.n}, delta={delta.label}: fixture quadric gives {computed.describe()}, "
                f"bundled model gives {bundled.describe()}"
            )
        trail.cited("cross-check", f"bundled model quadric agrees: {bundled.describe()}", fact.citation)
        if model.rigor is Rigor.VERIFIED:
            if not congruent_modulo_quadric(
                model.cubic_relation, bundled_model.cubic_relation, model.quadric_relation
            ):
                raise ClassificationIntegrityFailure(
                    f"N={level.n}, delta={delta.label}: fixture cubic {model.cubic_relation} differs from "
                    f"the bundled cubic modulo the quadric"
                )
            trail.cited("cross-check", "bundled cubic agrees modulo the quadric", fact.citation)
    return model


def decide(
    level: Level,
    delta: DeltaSubgroup,
    bundle: FactsBundle,
    fixtures: Optional[FixtureIndex] = None,
    point_degree: int = config.point_degree,
) -> Decision:
    _check_scope(level, delta)
    n = level.n
    invariants = invariants_of(level, delta)
    genus = invariants.genus
    trail = _Trail()
    trail.computed(
        "genus",
        f"mu={invariants.mu}, nu2={invariants.nu2}, nu3={invariants.nu3}, "
        f"cusps={invariants.nu_inf}, genus={genus}",
    )

    def done(verdict: Verdict, reason: Reason, detail: Optional[str] = None, rigor: Optional[Rigor] = None):
        decision = Decision(
            level=n,
            delta=list(delta.residues),
            delta_label=delta.label,
            delta_index=delta_index(delta),
            genus=genus,
            verdict=verdict,
            reason=reason,
            reason_detail=detail,
            rigor=rigor,
            evidence=trail.steps,
        )
        logger.debug("N=%d delta=%s: %s %s", n, delta.label, verdict.value, decision.reason_text)
        return decision

    # 1. X_0(N) itself has finitely many cubic points
    if not bundle.in_set_s(n):
        trail.cited("level", f"N={n} is not in S, so X_0(N) has finitely many cubic points", CITE_LEVEL_SET)
        return done(Verdict.FINITE, Reason.LEVEL_NOT_IN_S)
    trail.cited("level", f"N={n} is in S", CITE_LEVEL_SET)

    # 2. Genus at most one with a rational cusp
    if genus <= 1:
        trail.cited(
            "rational cusp",
            "X_Delta(N) has a rational cusp above the cusp 0 of X_0(N)",
            CITE_RATIONAL_CUSP,
        )
        kind = "P^1" if genus == 0 else "an elliptic curve"
        trail.computed("degree-3 map", f"genus {genus}: the curve is {kind} with a rational point")
        return done(Verdict.INFINITE, Reason.GENUS_AT_MOST_ONE)

    fact = bundle.gonality_fact(level, delta)
    if fact is None:
        raise UnclassifiedCase(f"No gonality fact for N={n}, delta={delta.label}")
    trail.cited(
        "gonality",
        f"{fact.gonality_class.value}, hyperelliptic={fact.hyperelliptic}, bielliptic={fact.bielliptic} "
        f"({fact.source})",
        fact.citation,
    )
    rank = bundle.jacobian_rank(level)
    rank_zero = rank is not None and rank.rank_of_jac_x1 is JacobianRank.ZERO

    def cite_rank():
        if rank is not None:
            trail.cited("jacobian rank", f"Jac(X_1({n}))(Q) has rank {rank.rank_of_jac_x1.value}", rank.citation)

    # 3. Hyperelliptic of genus >= 3 with a rank-zero Jacobian
    if fact.gonality_class is GonalityClass.AT_MOST_2 and fact.hyperelliptic and genus >= 3 and rank_zero:
        cite_rank()
        trail.cited(
            "hyperelliptic",
            "infinitely many cubic points would force positive rank on the Jacobian",
            CITE_HYPERELLIPTIC,
        )
        return done(Verdict.FINITE, Reason.HYPERELLIPTIC_RANK_ZERO)

    # 4. Trigonal plane quartic
    if fact.gonality_class is GonalityClass.EXACTLY_3 and genus == 3:
        trail.cited("rational cusp", "the curve has a rational cusp", CITE_RATIONAL_CUSP)
        trail.cited(
            "plane quartic",
            "projection from the rational cusp is a degree-3 map to P^1 over Q",
            CITE_PLANE_QUARTIC,
        )
        return done(Verdict.INFINITE, Reason.TRIGONAL_GENUS_3)

    # 5. Genus 4: the quadric containing the canonical curve
    if fact.gonality_class is GonalityClass.EXACTLY_3 and genus == 4:
        model = _genus4_model(level, delta, bundle, fixtures, trail)
        trigonal = is_trigonal_over_q(model)
        surface = trigonal.classification
        diagonal = ", ".join(str(d) for d in surface.diagonal)
        trail.computed(
            "quadric",
            f"rank {surface.rank}, diagonal ({diagonal}), squarefree discriminant {surface.squarefree_disc}: "
            f"{surface.describe()}",
        )
        trail.cited("trigonal", trigonal.reason, CITE_GENUS4_SURFACE)
        if trigonal:
            if surface.verdict is QuadricVerdict.RULED_OVER_Q:
                trail.cited(
                    "rational point",
                    "the rational cusp lies on the quadric, so the rulings are defined over Q",
                    CITE_RATIONAL_CUSP,
                )
            return done(Verdict.INFINITE, Reason.TRIGONAL_GENUS_4_QUADRIC, surface.describe(), model.rigor)
        if surface.verdict is QuadricVerdict.RULED_OVER_FIELD and rank_zero:
            cite_rank()
            trail.cited(
                "not trigonal over Q",
                "infinitely many cubic points would force positive rank on Jac(X_1(N))",
                CITE_NOT_TRIGONAL_OVER_Q,
            )
            return done(
                Verdict.FINITE, Reason.NOT_TRIGONAL_OVER_Q_RANK_ZERO, surface.describe(), model.rigor
            )

    # 6. Bielliptic with gonality > 3
    if fact.gonality_class is GonalityClass.GREATER_THAN_3 and fact.bielliptic and rank_zero:
        cite_rank()
        trail.cited(
            "bielliptic",
            "infinitely many cubic points would put a positive-rank elliptic curve in the Jacobian",
            CITE_BIELLIPTIC,
        )
        return done(Verdict.FINITE, Reason.BIELLIPTIC_RANK_ZERO)

    # 7. Gonality > 3, not bielliptic: a degree-3 map to a positive-rank elliptic curve
    if fact.gonality_class is GonalityClass.GREATER_THAN_3 and not fact.bielliptic:
        trail.cited("rational cusp", "the curve has a rational cusp", CITE_RATIONAL_CUSP)
        trail.cited(
            "elliptic target",
            f"infinitely many cubic points give a degree-{point_degree} map to a positive-rank "
            f"elliptic curve E with Cond(E) | N",
            CITE_MAP_TO_ELLIPTIC,
        )
        curves = positive_rank_curves(level, bundle)
        if not curves:
            trail.computed("elliptic curves", f"no positive-rank curve has conductor dividing {n}")
            return done(Verdict.FINITE, Reason.NO_POSITIVE_RANK_CURVE)

        reason = _obstruct_all(level, delta, curves, point_degree, trail)
        if reason is not None:
            return done(Verdict.FINITE, reason)

    raise UnclassifiedCase(
        f"No rule decides N={n}, delta={delta.label} (genus {genus}, {fact.gonality_class.value})"
    )


# =========================
# Obstructions
# =========================

class CurveObstruction(BaseModel):
    """Outcome of the obstruction arguments against one elliptic target"""

    curve: str
    square_degree: ObstructionResult
    ramification: Optional[ObstructionResult] = None
    setup: Dict[str, int] = Field(default_factory=dict)

    @property
    def obstructed(self) -> bool:
        if self.square_degree.obstructed:
            return True
        return self.ramification is not None and self.ramification.obstructed


class ObstructionRun(BaseModel):
    level: int
    delta: List[int]
    delta_label: str
    deg_x1_to_delta: int
    deg_delta_to_x0: int
    deg_delta_to_plus: int
    genus_x1: int
    point_degree: int
    curves: List[CurveObstruction] = Field(default_factory=list)

    @property
    def obstructed(self) -> bool:
        return bool(self.curves) and all(c.obstructed for c in self.curves)


def _fibre_setup(level: Level, delta: DeltaSubgroup, deg_f: int, deg_alpha: int) -> RamificationSetup:
    if delta == DELTA_37 and deg_f == 3:
        return ramification_setup_37(deg_alpha=deg_alpha)
    return ramification_setup(level, delta, deg_f, deg_alpha)


def obstruct_curve(
    level: Level, delta: DeltaSubgroup, curve: EllipticCurveFact, point_degree: int = config.point_degree
) -> CurveObstruction:
    """Square-degree test, then the fibre argument when the square test is inconclusive"""
    if curve.x0_plus_iso != level.n:
        raise PreconditionViolation(
            f"{curve.label} is not X_0^+({level.n}); only that quotient has a known optimal parametrization here"
        )
    chain = covering_degrees(level, delta)
    genus_x1 = gamma1_invariants(level).genus
    square = square_degree_obstruction(
        chain.deg_x1_to_delta, chain.deg_delta_to_plus, point_degree, curve.as_target(), genus_x1
    )
    if square.obstructed or "beta_degree" not in square.numerics:
        return CurveObstruction(curve=curve.label, square_degree=square)

    setup = _fibre_setup(level, delta, point_degree, square.numerics["beta_degree"])
    ramified = ramification_obstruction(setup.deg_f, setup.required_index)
    return CurveObstruction(
        curve=curve.label,
        square_degree=square,
        ramification=ramified,
        setup={
            "fixed_points": setup.fixed_points,
            "genus_x0_plus": setup.x0_plus.genus_bottom,
            "deg_pi": setup.deg_pi,
            "deg_alpha": setup.deg_alpha,
            "fiber_points": setup.fiber_points,
            "fiber_index": setup.fiber_index,
            "known_ramification": setup.known_ramification,
            "allowed_ramification": setup.required_total_ramification,
        },
    )


def obstruct(
    level: Level, delta: DeltaSubgroup, bundle: FactsBundle, point_degree: int = config.point_degree
) -> ObstructionRun:
    """Run the obstruction arguments against every positive-rank curve with conductor dividing N"""
    _check_scope(level, delta)
    chain = covering_degrees(level, delta)
    run = ObstructionRun(
        level=level.n,
        delta=list(delta.residues),
        delta_label=delta.label,
        deg_x1_to_delta=chain.deg_x1_to_delta,
        deg_delta_to_x0=chain.deg_delta_to_x0,
        deg_delta_to_plus=chain.deg_delta_to_plus,
        genus_x1=gamma1_invariants(level).genus,
        point_degree=point_degree,
    )
    for curve in positive_rank_curves(level, bundle):
        run.curves.append(obstruct_curve(level, delta, curve, point_degree))
    return run


def _obstruct_all(level, delta, curves, point_degree, trail: _Trail) -> Optional[Reason]:
    """Every candidate target must be ruled out; returns the strongest argument used"""
    chain = covering_degrees(level, delta)
    genus_x1 = gamma1_invariants(level).genus
    trail.computed(
        "degrees",
        f"X_1 -> X_Delta: {chain.deg_x1_to_delta}, X_Delta -> X_0: {chain.deg_delta_to_x0}, "
        f"X_Delta -> X_0^+: {chain.deg_delta_to_plus}, genus(X_1)={genus_x1}",
    )
    strongest = Reason.SQUARE_DEGREE_OBSTRUCTION
    for curve in curves:
        trail.cited(
            "elliptic curve",
            f"{curve.label}: rank {curve.rank}, CM={curve.has_cm}, isogeny class size "
            f"{curve.isogeny_class_size}, X_0^+({curve.x0_plus_iso}) isomorphic to it",
            curve.citation,
        )
        if curve.x0_plus_iso != level.n:
            return None
        trail.cited("optimal parametrization", "maps from X_1(N) factor through the optimal one", CITE_OPTIMAL)
        result = obstruct_curve(level, delta, curve, point_degree)
        trail.computed("square degree", result.square_degree.describe())
        if result.obstructed and result.ramification is None:
            continue
        if result.ramification is None:
            return None

        setup = result.setup
        trail.computed(
            "Atkin-Lehner",
            f"w_{level.n} has {setup['fixed_points']} fixed points; X_0^+({level.n}) has genus "
            f"{setup['genus_x0_plus']}",
        )
        trail.cited(
            "unramified",
            "X_Delta(N) -> X_0(N) is unramified above the fixed points of w_N",
            CITE_UNRAMIFIED,
        )
        trail.computed(
            "fibres",
            f"g has {setup['fiber_points']} points of index {setup['fiber_index']} over a fixed-point "
            f"image; alpha (degree {setup['deg_alpha']}) has {setup['deg_alpha']} unramified points there",
        )
        trail.computed("ramification", result.ramification.describe())
        if not result.ramification.obstructed:
            return None
        strongest = Reason.RAMIFICATION_OBSTRUCTION
    return strongest


def survey_targets(max_n: int) -> List[Tuple[Level, DeltaSubgroup]]:
    """Every (N, Delta) with N <= max_n and Delta proper and nontrivial, in report order"""
    targets = []
    for n in range(1, max_n + 1):
        level = Level(n)
        targets.extend((level, delta) for delta in proper_delta_subgroups(level))
    return targets


def survey(
    max_n: int,
    bundle: FactsBundle,
    fixtures: Optional[FixtureIndex] = None,
    jobs: int = 1,
) -> List[Decision]:
    if max_n < 3:
        raise UsageError(f"max_n must be at least 3, got {max_n}")
    targets = survey_targets(max_n)
    logger.info("Surveying %d curves with N <= %d", len(targets), max_n)
    if jobs <= 1:
        return [decide(level, delta, bundle, fixtures) for level, delta in targets]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda target: decide(target[0], target[1], bundle, fixtures), targets))
