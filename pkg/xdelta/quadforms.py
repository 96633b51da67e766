"""
Binary quadratic forms, Atkin-Lehner fixed points, Riemann-Hurwitz
"""
import logging
from dataclasses import dataclass
from math import gcd, isqrt
from typing import List, Tuple

from sympy import isprime

from .cosets import gamma0_invariants
from .errors import BadDiscriminant, EvenPrime, NonIntegralGenus, NotPrime
from .zmod import Level

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BQF:
    """The form a x^2 + b xy + c y^2"""
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def __str__(self) -> str:
        return f"({self.a}, {self.b}, {self.c})"


def _check_discriminant(d: int):
    if d >= 0 or d % 4 not in (0, 1):
        raise BadDiscriminant(f"{d} is not a negative discriminant (need D < 0, D = 0 or 1 mod 4)")


def reduced_forms(d: int) -> List[BQF]:
    """All primitive reduced positive definite forms of discriminant d"""
    _check_discriminant(d)
    forms = []
    for a in range(1, isqrt(-d // 3) + 1):
        for b in range(-a, a + 1):
            if (b - d) % 2:
                continue
            numerator = b * b - d
            if numerator % (4 * a):
                continue
            form = BQF(a, b, numerator // (4 * a))
            if form.is_reduced() and form.is_primitive():
                forms.append(form)
    return forms


def class_number(d: int) -> int:
    return len(reduced_forms(d))


def atkin_lehner_fixed_points(n: int) -> int:
    """Fixed points of w_N on X_0(N) for an odd prime N"""
    if n == 2:
        raise EvenPrime("The fixed-point formula is implemented for odd primes only")
    if not isprime(n):
        raise NotPrime(f"{n} is not prime")
    if n % 4 == 1:
        count = class_number(-4 * n)
    else:
        count = class_number(-n) + class_number(-4 * n)
    logger.debug("w_%d has %d fixed points on X_0(%d)", n, count, n)
    return count


def quotient_genus(genus_top: int, fixed_points: int) -> int:
    """Genus of the quotient by an involution with the given number of fixed points"""
    numerator = 2 * genus_top + 2 - fixed_points
    if numerator % 4 or numerator < 0:
        raise NonIntegralGenus(
            f"No integral quotient genus for genus {genus_top} with {fixed_points} fixed points"
        )
    return numerator // 4


@dataclass(frozen=True)
class RamificationDatum:
    genus_top: int
    genus_bottom: int
    degree: int
    ramification_points: Tuple[Tuple[int, int], ...] = ()  # (count, index)

    @property
    def total_ramification(self) -> int:
        return sum(count * (index - 1) for count, index in self.ramification_points)


def check_riemann_hurwitz(datum: RamificationDatum) -> bool:
    lhs = 2 * datum.genus_top - 2
    rhs = datum.degree * (2 * datum.genus_bottom - 2) + datum.total_ramification
    return lhs == rhs


def x0_plus_datum(level: Level) -> RamificationDatum:
    """The double cover X_0(N) -> X_0^+(N) for an odd prime N"""
    genus_x0 = gamma0_invariants(level).genus
    fixed = atkin_lehner_fixed_points(level.n)
    datum = RamificationDatum(
        genus_top=genus_x0,
        genus_bottom=quotient_genus(genus_x0, fixed),
        degree=2,
        ramification_points=((fixed, 2),),
    )
    assert check_riemann_hurwitz(datum)
    return datum
