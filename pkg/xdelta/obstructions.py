"""
Obstructions to a degree-3 map from X_Delta(N) onto an elliptic curve

Two arguments are implemented: the square-degree test on the isogeny that
would have to factor the optimal parametrization, and the ramification test
on the fibre above the image of an Atkin-Lehner fixed point.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from math import isqrt
from typing import Dict, List

from pydantic import BaseModel, Field
from sympy import divisors

from .cosets import covering_degrees, genus_of
from .errors import PreconditionViolation, SetupMismatch
from .quadforms import (
    RamificationDatum,
    atkin_lehner_fixed_points,
    check_riemann_hurwitz,
    x0_plus_datum,
)
from .zmod import DeltaSubgroup, Level

logger = logging.getLogger(__name__)


class ObstructionStatus(str, Enum):
    OBSTRUCTED = "Obstructed"
    INCONCLUSIVE = "Inconclusive"


class ObstructionReason(str, Enum):
    NON_INTEGRAL_ISOGENY_DEGREE = "NonIntegralIsogenyDegree"
    NON_SQUARE_ISOGENY_DEGREE = "NonSquareIsogenyDegree"
    RAMIFICATION_PARITY_VIOLATION = "RamificationParityViolation"
    OPTIMAL_NOT_FORCED = "OptimalNotForced"
    SQUARE_ISOGENY_DEGREE = "SquareIsogenyDegree"
    PARTITION_EXISTS = "PartitionExists"


OBSTRUCTING_REASONS = {
    ObstructionReason.NON_INTEGRAL_ISOGENY_DEGREE,
    ObstructionReason.NON_SQUARE_ISOGENY_DEGREE,
    ObstructionReason.RAMIFICATION_PARITY_VIOLATION,
}


class ObstructionResult(BaseModel):
    status: ObstructionStatus
    reason: ObstructionReason
    numerics: Dict[str, int] = Field(default_factory=dict)

    model_config = {"frozen": True}

    @property
    def obstructed(self) -> bool:
        return self.status is ObstructionStatus.OBSTRUCTED

    def describe(self) -> str:
        values = ", ".join(f"{k}={v}" for k, v in self.numerics.items())
        return f"{self.status.value}({self.reason.value}){': ' + values if values else ''}"


def _obstructed(reason: ObstructionReason, **numerics: int) -> ObstructionResult:
    return ObstructionResult(status=ObstructionStatus.OBSTRUCTED, reason=reason, numerics=numerics)


def _inconclusive(reason: ObstructionReason, **numerics: int) -> ObstructionResult:
    return ObstructionResult(status=ObstructionStatus.INCONCLUSIVE, reason=reason, numerics=numerics)


@dataclass(frozen=True)
class EllipticTarget:
    label: str
    conductor: int
    rank: int
    has_cm: bool
    isogeny_class_size: int


def _is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def forced_degrees(total: int) -> List[int]:
    """Degrees d >= 2 dividing total whose cofactor total/d is a perfect square"""
    return [d for d in divisors(total) if d >= 2 and _is_square(total // d)]


def square_degree_obstruction(
    deg_phi: int, deg_to_plus: int, deg_f: int, target: EllipticTarget, genus_x1: int
) -> ObstructionResult:
    """
    Test whether X_1(N) -> X_Delta(N) -> E of degree deg_f can factor X_0^+(N)

    The composite X_1(N) -> E must differ from the optimal parametrization by
    an isogeny of square degree, which pins the optimal degree when only one
    divisor has a square cofactor. An isogeny beta with beta o f = g then has
    degree deg_to_plus / deg_f, which must be a square as well.
    """
    if target.has_cm:
        raise PreconditionViolation(f"{target.label} has complex multiplication")
    if target.isogeny_class_size != 1:
        raise PreconditionViolation(
            f"{target.label} is not alone in its isogeny class (size {target.isogeny_class_size})"
        )
    if genus_x1 < 1:
        raise PreconditionViolation("X_1(N) must have positive genus")
    if deg_f < 1 or deg_phi < 1 or deg_to_plus < 1:
        raise PreconditionViolation("Degrees must be positive")

    composite = deg_f * deg_phi
    forced = forced_degrees(composite)
    if forced != [composite]:
        logger.debug("Composite degree %d does not force the optimal degree: %s", composite, forced)
        return _inconclusive(ObstructionReason.OPTIMAL_NOT_FORCED, candidate_degree=composite)

    if deg_to_plus % deg_f:
        return _obstructed(
            ObstructionReason.NON_INTEGRAL_ISOGENY_DEGREE,
            candidate_degree=composite, deg_to_plus=deg_to_plus,
        )
    beta = deg_to_plus // deg_f
    if not _is_square(beta):
        return _obstructed(
            ObstructionReason.NON_SQUARE_ISOGENY_DEGREE,
            candidate_degree=composite, beta_degree=beta,
        )
    return _inconclusive(
        ObstructionReason.SQUARE_ISOGENY_DEGREE, candidate_degree=composite, beta_degree=beta
    )


def ramification_obstruction(deg_f: int, required_index: int) -> ObstructionResult:
    """A fibre of f has degree deg_f; every point in it must have index required_index"""
    if deg_f < 1 or required_index < 1:
        raise PreconditionViolation("Degree and ramification index must be positive")
    if deg_f % required_index:
        return _obstructed(
            ObstructionReason.RAMIFICATION_PARITY_VIOLATION,
            deg_f=deg_f, required_index=required_index,
        )
    return _inconclusive(
        ObstructionReason.PARTITION_EXISTS, deg_f=deg_f, required_index=required_index
    )


# =========================
# Ramification setup
# =========================

@dataclass(frozen=True)
class RamificationSetup:
    """
    Fibres above the image of an Atkin-Lehner fixed point

    g = X_Delta(N) -> X_0^+(N) factors as alpha o f with alpha an unramified
    isogeny. Over the image of a fixed point, g has fiber_points points of
    index fiber_index; alpha has alpha_points points of index 1.
    """
    level: int
    delta: str
    genus_x0: int
    fixed_points: int
    deg_pi: int
    deg_g: int
    deg_alpha: int
    deg_f: int
    fiber_points: int
    fiber_index: int
    alpha_points: int
    required_index: int
    x0_plus: RamificationDatum
    alpha: RamificationDatum
    required_total_ramification: int
    known_ramification: int


def ramification_setup(
    level: Level, delta: DeltaSubgroup, deg_f: int, deg_alpha: int
) -> RamificationSetup:
    """
    Set up the fibre argument for an odd prime level whose X_0^+(N) is elliptic

    X_Delta(N) -> X_0(N) is unramified above the fixed points of w_N (an
    imported fact), so each fixed point lifts to deg_pi points of index 2
    for g.
    """
    x0_plus = x0_plus_datum(level)
    if x0_plus.genus_bottom != 1:
        raise SetupMismatch(f"X_0^+({level.n}) has genus {x0_plus.genus_bottom}, not 1")

    chain = covering_degrees(level, delta)
    deg_pi = chain.deg_delta_to_x0
    deg_g = chain.deg_delta_to_plus
    if deg_alpha * deg_f != deg_g:
        raise SetupMismatch(
            f"deg(alpha) * deg(f) = {deg_alpha} * {deg_f} does not equal deg(g) = {deg_g}"
        )

    alpha = RamificationDatum(genus_top=1, genus_bottom=1, degree=deg_alpha)
    if not check_riemann_hurwitz(alpha):
        raise SetupMismatch("An isogeny of genus-1 curves must be unramified")

    fixed = x0_plus.ramification_points[0][0]
    genus_delta = genus_of(level, delta)
    required = (2 * genus_delta - 2) - deg_g * (2 * 1 - 2)
    known = fixed * deg_pi * (2 - 1)
    if known > required:
        raise SetupMismatch(
            f"Fibres above the fixed points need ramification {known}, "
            f"but Riemann-Hurwitz allows only {required}"
        )

    setup = RamificationSetup(
        level=level.n,
        delta=delta.label,
        genus_x0=x0_plus.genus_top,
        fixed_points=fixed,
        deg_pi=deg_pi,
        deg_g=deg_g,
        deg_alpha=deg_alpha,
        deg_f=deg_f,
        fiber_points=deg_pi,
        fiber_index=2,
        alpha_points=deg_alpha,
        required_index=2,
        x0_plus=x0_plus,
        alpha=alpha,
        required_total_ramification=required,
        known_ramification=known,
    )
    logger.debug("Ramification setup for N=%d delta=%s: %s", level.n, delta, setup)
    return setup


LEVEL_37 = Level(37)
DELTA_37 = DeltaSubgroup.from_pm(LEVEL_37, (1, 10, 11))


def ramification_setup_37(
    genus_x0: int = 2, fixed_points: int = 2, deg_pi: int = 6, deg_alpha: int = 4
) -> RamificationSetup:
    """The fibre argument for X_Delta(37) with Delta = {+-1, +-10, +-11}"""
    setup = ramification_setup(LEVEL_37, DELTA_37, deg_f=3, deg_alpha=deg_alpha)
    expected = {
        "genus_x0": (genus_x0, setup.genus_x0),
        "fixed_points": (fixed_points, atkin_lehner_fixed_points(37)),
        "deg_pi": (deg_pi, setup.deg_pi),
    }
    for name, (given, computed) in expected.items():
        if given != computed:
            raise SetupMismatch(f"{name} = {given} disagrees with the computed value {computed}")
    return setup
