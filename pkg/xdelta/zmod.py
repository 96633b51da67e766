"""
Unit groups (Z/NZ)^x and the subgroups Delta that parameterize X_Delta(N)
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterable, List, Sequence, Tuple

from .errors import NonUnitGenerator, UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Level:
    """The modulus N"""
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise UsageError(f"Level must be a positive integer, got {self.n!r}")

    def __int__(self) -> int:
        return self.n

    def __str__(self) -> str:
        return str(self.n)


@dataclass(frozen=True)
class DeltaSubgroup:
    """
    A subgroup Delta of (Z/NZ)^x containing -1

    Residues are canonical integers in [1, N-1], sorted ascending. For N = 1
    the unit group is trivial and the residue list is empty.
    """
    level: Level
    residues: Tuple[int, ...]

    def __post_init__(self):
        n = self.level.n
        residues = tuple(self.residues)
        object.__setattr__(self, "residues", residues)
        if n == 1:
            if residues:
                raise UsageError("The unit group modulo 1 is trivial")
            return
        if list(residues) != sorted(set(residues)):
            raise UsageError(f"Residues must be sorted and distinct: {residues}")
        for r in residues:
            if not 1 <= r < n or gcd(r, n) != 1:
                raise UsageError(f"{r} is not a unit modulo {n}")
        if 1 not in residues or (n - 1) not in residues:
            raise UsageError(f"Delta modulo {n} must contain 1 and -1")
        members = set(residues)
        for a in residues:
            for b in residues:
                if (a * b) % n not in members:
                    raise UsageError(f"{residues} is not closed under multiplication modulo {n}")

    @classmethod
    def from_pm(cls, level: Level, representatives: Iterable[int]) -> "DeltaSubgroup":
        """Build Delta from +-representatives, e.g. (1, 5) -> {+-1, +-5}"""
        n = level.n
        members = set()
        for r in representatives:
            members.add(r % n)
            members.add((-r) % n)
        if n == 1:
            return cls(level, ())
        return cls(level, tuple(sorted(members)))

    @property
    def order(self) -> int:
        return len(self.scalars)

    @property
    def scalars(self) -> Tuple[int, ...]:
        """Residues used for scaling; (0,) stands in for the trivial group modulo 1"""
        return self.residues if self.residues else (1 % self.level.n,)

    @property
    def is_trivial(self) -> bool:
        return self.order == len(pm_one(self.level))

    @property
    def is_full(self) -> bool:
        return self.order == len(units(self.level)) or self.level.n == 1

    @property
    def pm_representatives(self) -> Tuple[int, ...]:
        n = self.level.n
        return tuple(sorted({min(r, n - r) for r in self.residues}))

    @property
    def label(self) -> str:
        if not self.residues:
            return "{1}"
        return "{" + ", ".join(f"±{r}" for r in self.pm_representatives) + "}"

    def __contains__(self, residue: int) -> bool:
        return residue % self.level.n in self.scalars

    def __str__(self) -> str:
        return ",".join(str(r) for r in self.residues)


def units(level: Level) -> List[int]:
    """Ascending residues r in [1, N-1] with gcd(r, N) = 1"""
    n = level.n
    return [r for r in range(1, n) if gcd(r, n) == 1]


def pm_one(level: Level) -> Tuple[int, ...]:
    """The residues of +-1, collapsed when N <= 2"""
    n = level.n
    if n == 1:
        return (0,)
    return tuple(sorted({1, n - 1}))


def subgroup_closure(level: Level, generators: Sequence[int]) -> DeltaSubgroup:
    """Smallest subgroup of (Z/NZ)^x containing the generators and -1"""
    n = level.n
    if n == 1:
        return DeltaSubgroup(level, ())

    gens = []
    for g in generators:
        if gcd(g, n) != 1:
            raise NonUnitGenerator(g, n)
        gens.append(g % n)
    gens.append(n - 1)

    members = {1}
    frontier = [1]
    while frontier:
        element = frontier.pop()
        for g in gens:
            product = (element * g) % n
            if product not in members:
                members.add(product)
                frontier.append(product)

    return DeltaSubgroup(level, tuple(sorted(members)))


def _sort_key(delta: DeltaSubgroup):
    return (delta.order, delta.residues)


def enumerate_delta_subgroups(level: Level) -> List[DeltaSubgroup]:
    """
    All subgroups of (Z/NZ)^x containing -1, ordered by size then residues

    Every such subgroup is a join of cyclic subgroups, so a breadth-first search
    that adjoins one cyclic generator at a time starting from {+-1} reaches all
    of them.
    """
    return list(_delta_subgroups(level))


@lru_cache(maxsize=None)
def _delta_subgroups(level: Level) -> Tuple[DeltaSubgroup, ...]:
    all_units = units(level)
    start = subgroup_closure(level, [])

    # One generator per distinct cyclic subgroup
    cyclic_generators = []
    seen_cyclic = set()
    for g in all_units:
        cyclic = subgroup_closure(level, [g]).residues
        if cyclic not in seen_cyclic:
            seen_cyclic.add(cyclic)
            cyclic_generators.append(g)

    found = {start.residues: start}
    queue = [start]
    while queue:
        current = queue.pop(0)
        for g in cyclic_generators:
            if g in current:
                continue
            bigger = subgroup_closure(level, list(current.residues) + [g])
            if bigger.residues not in found:
                found[bigger.residues] = bigger
                queue.append(bigger)

    result = tuple(sorted(found.values(), key=_sort_key))
    logger.debug("N=%d: %d subgroups containing -1", level.n, len(result))
    return result


def proper_delta_subgroups(level: Level) -> List[DeltaSubgroup]:
    """Subgroups with {+-1} < Delta < (Z/NZ)^x, both inclusions strict"""
    return [d for d in enumerate_delta_subgroups(level) if not d.is_trivial and not d.is_full]


def delta_index(delta: DeltaSubgroup) -> int:
    """1-based position of Delta among the proper subgroups at its level (0 if not proper)"""
    for i, candidate in enumerate(proper_delta_subgroups(delta.level), 1):
        if candidate == delta:
            return i
    return 0


def parse_residues(level: Level, text: str) -> DeltaSubgroup:
    """
    Parse a CLI residue list such as "1,10,11,26,27,36" or "1,10,11"

    The listed residues are closed under -1; the result must already be a
    subgroup (no further closure is applied beyond adding negatives).
    """
    try:
        values = [int(part) for part in text.replace(" ", "").split(",") if part]
    except ValueError:
        raise UsageError(f"Could not parse residue list: {text!r}")
    if not values:
        raise UsageError("Residue list is empty")
    for v in values:
        if gcd(v, level.n) != 1:
            raise NonUnitGenerator(v, level.n)
    return DeltaSubgroup.from_pm(level, values)
