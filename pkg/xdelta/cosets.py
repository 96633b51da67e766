"""
Permutation model of the right coset space Gamma_Delta(N) \\ PSL_2(Z)

A right coset Gamma_Delta(N) g is determined by the bottom row (c, d) of g
modulo N, up to scaling by Delta. PSL_2(Z) acts on the right through
T = [[1, 1], [0, 1]] and S = [[0, -1], [1, 0]]; genus and covering data
follow from the fixed points and orbits of these permutations.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Dict, List, Tuple

from sympy import totient

from .errors import NonIntegralGenus
from .zmod import DeltaSubgroup, Level, pm_one, subgroup_closure, units

logger = logging.getLogger(__name__)

Label = Tuple[int, int]


@dataclass(frozen=True)
class CosetSpace:
    level: Level
    delta: DeltaSubgroup
    labels: Tuple[Label, ...]
    sigma_S: Tuple[int, ...]
    sigma_T: Tuple[int, ...]
    sigma_R: Tuple[int, ...]  # first S, then T

    @property
    def index(self) -> int:
        return len(self.labels)

    def check_relations(self) -> bool:
        """True when sigma_S^2 = id and sigma_R^3 = id"""
        s, r = self.sigma_S, self.sigma_R
        return all(s[s[i]] == i for i in range(self.index)) and all(
            r[r[r[i]]] == i for i in range(self.index)
        )

    def cusp_widths(self) -> List[int]:
        """Cycle lengths of sigma_T, in order of first appearance"""
        seen = [False] * self.index
        widths = []
        for start in range(self.index):
            if seen[start]:
                continue
            length = 0
            i = start
            while not seen[i]:
                seen[i] = True
                i = self.sigma_T[i]
                length += 1
            widths.append(length)
        return widths


@dataclass(frozen=True)
class CurveInvariants:
    mu: int
    nu2: int
    nu3: int
    nu_inf: int
    genus: int


@dataclass(frozen=True)
class CoveringChain:
    deg_x1_to_delta: int
    deg_delta_to_x0: int
    deg_x0_to_plus: int = 2

    @property
    def deg_delta_to_plus(self) -> int:
        return self.deg_delta_to_x0 * self.deg_x0_to_plus


@lru_cache(maxsize=None)
def build_coset_space(level: Level, delta: DeltaSubgroup) -> CosetSpace:
    """Build the permutation model; pairs are canonicalized to the least Delta-scaling"""
    n = level.n
    scalars = delta.scalars

    # Scanning pairs lexicographically, the first member met of each orbit is its least element
    canonical: Dict[Label, int] = {}
    labels: List[Label] = []
    for c in range(n):
        for d in range(n):
            if (c, d) in canonical or gcd(gcd(c, d), n) != 1:
                continue
            idx = len(labels)
            labels.append((c, d))
            for lam in scalars:
                canonical[((lam * c) % n, (lam * d) % n)] = idx

    def image(c: int, d: int) -> int:
        return canonical[(c % n, d % n)]

    sigma_S = tuple(image(d, -c) for c, d in labels)
    sigma_T = tuple(image(c, c + d) for c, d in labels)
    sigma_R = tuple(image(d, d - c) for c, d in labels)

    logger.debug("Coset space N=%d delta=%s: %d labels", n, delta, len(labels))
    return CosetSpace(level, delta, tuple(labels), sigma_S, sigma_T, sigma_R)


def curve_invariants(space: CosetSpace) -> CurveInvariants:
    mu = space.index
    nu2 = sum(1 for i, j in enumerate(space.sigma_S) if i == j)
    nu3 = sum(1 for i, j in enumerate(space.sigma_R) if i == j)
    nu_inf = len(space.cusp_widths())

    numerator = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * nu_inf
    if numerator % 12 != 0 or numerator < 0:
        raise NonIntegralGenus(
            f"N={space.level.n}, delta={space.delta}: mu={mu}, nu2={nu2}, nu3={nu3}, "
            f"cusps={nu_inf} give no integral genus"
        )
    return CurveInvariants(mu=mu, nu2=nu2, nu3=nu3, nu_inf=nu_inf, genus=numerator // 12)


@lru_cache(maxsize=None)
def invariants_of(level: Level, delta: DeltaSubgroup) -> CurveInvariants:
    return curve_invariants(build_coset_space(level, delta))


def genus_of(level: Level, delta: DeltaSubgroup) -> int:
    return invariants_of(level, delta).genus


def full_group(level: Level) -> DeltaSubgroup:
    return subgroup_closure(level, units(level))


def trivial_group(level: Level) -> DeltaSubgroup:
    return subgroup_closure(level, [])


def gamma0_invariants(level: Level) -> CurveInvariants:
    """Invariants of X_0(N)"""
    return invariants_of(level, full_group(level))


def gamma1_invariants(level: Level) -> CurveInvariants:
    """Invariants of X_1(N)"""
    return invariants_of(level, trivial_group(level))


def covering_degrees(level: Level, delta: DeltaSubgroup) -> CoveringChain:
    """
    Degrees of X_1(N) -> X_Delta(N) -> X_0(N) -> X_0^+(N)

    Degrees come from subgroup orders and are cross-checked against the
    coset-space cardinalities.
    """
    phi = int(totient(level.n))
    sign_order = len(pm_one(level))
    chain = CoveringChain(
        deg_x1_to_delta=delta.order // sign_order,
        deg_delta_to_x0=phi // delta.order,
    )

    mu_delta = build_coset_space(level, delta).index
    mu_0 = build_coset_space(level, full_group(level)).index
    mu_1 = build_coset_space(level, trivial_group(level)).index
    assert mu_delta == mu_0 * chain.deg_delta_to_x0, "index multiplicativity failed"
    assert mu_1 == mu_delta * chain.deg_x1_to_delta, "index multiplicativity failed"
    return chain
