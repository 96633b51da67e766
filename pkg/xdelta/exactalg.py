"""
Exact rational linear algebra

Row reduction and kernels over Q, congruence diagonalization of symmetric
forms, and square classes of rationals. No floating point anywhere: every
verdict downstream is a square-class statement.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd, lcm, prod
from typing import List, Mapping, Optional, Sequence, Tuple

from sympy import factorint

from .errors import PreconditionViolation, UsageError, ZeroInput

logger = logging.getLogger(__name__)

ExactRational = Fraction


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: Tuple[Tuple[Fraction, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "RationalMatrix":
        entries = tuple(tuple(Fraction(x) for x in row) for row in rows)
        width = cols if cols is not None else (len(entries[0]) if entries else 0)
        for row in entries:
            if len(row) != width:
                raise UsageError("Matrix rows must all have the same length")
        return cls(len(entries), width, entries)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def parse(cls, text: str) -> "RationalMatrix":
        """Parse "a11,a12,...;a21,..." (entries may be integers or p/q)"""
        rows = [row for row in text.strip().split(";") if row.strip()]
        try:
            return cls.from_rows([[Fraction(x.strip()) for x in row.split(",")] for row in rows])
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"Could not parse matrix {text!r}")

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        i, j = key
        return self.entries[i][j]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix.from_rows(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows
        )

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise UsageError("Matrix dimensions do not match")
        return RationalMatrix.from_rows(
            [
                [sum((self.entries[i][k] * other.entries[k][j] for k in range(self.cols)), Fraction(0))
                 for j in range(other.cols)]
                for i in range(self.rows)
            ],
            other.cols,
        )

    def apply(self, vector: Sequence) -> Tuple[Fraction, ...]:
        return tuple(
            sum((self.entries[i][k] * vector[k] for k in range(self.cols)), Fraction(0))
            for i in range(self.rows)
        )

    def rref(self) -> Tuple["RationalMatrix", List[int]]:
        """Reduced row echelon form with leftmost pivots"""
        m = [list(row) for row in self.entries]
        pivots: List[int] = []
        piv_r = 0
        for piv_c in range(self.cols):
            for i_row in range(piv_r, self.rows):
                if m[i_row][piv_c] != 0:
                    break
            else:
                continue
            if i_row != piv_r:
                m[piv_r], m[i_row] = m[i_row], m[piv_r]
            fp = m[piv_r][piv_c]
            m[piv_r] = [x / fp for x in m[piv_r]]
            for r in range(self.rows):
                fr = m[r][piv_c]
                if r == piv_r or fr == 0:
                    continue
                m[r] = [a - fr * b for a, b in zip(m[r], m[piv_r])]
            pivots.append(piv_c)
            piv_r += 1
            if piv_r == self.rows:
                break
        return RationalMatrix.from_rows(m, self.cols), pivots

    def rank(self) -> int:
        return len(self.rref()[1])


def normalize_integer_vector(vector: Sequence) -> Tuple[int, ...]:
    """Clear denominators, divide by content, make the first nonzero entry positive"""
    values = [Fraction(x) for x in vector]
    denominator = lcm(*(x.denominator for x in values)) if values else 1
    ints = [int(x * denominator) for x in values]
    content = 0
    for x in ints:
        content = gcd(content, x)
    if content == 0:
        return tuple(ints)
    ints = [x // content for x in ints]
    first = next(x for x in ints if x != 0)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def kernel_basis(m: RationalMatrix) -> List[Tuple[int, ...]]:
    """Basis of {v : m v = 0}, one vector per free column in ascending order"""
    reduced, pivots = m.rref()
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * m.cols
        vec[free] = Fraction(1)
        for r, c in enumerate(pivots):
            vec[c] = -reduced[r, free]
        basis.append(normalize_integer_vector(vec))
    logger.debug("Kernel of %dx%d matrix has dimension %d", m.rows, m.cols, len(basis))
    return basis


# =========================
# Symmetric forms
# =========================

@dataclass(frozen=True)
class SymmetricForm:
    n: int
    matrix: RationalMatrix

    def __post_init__(self):
        if self.matrix.rows != self.n or self.matrix.cols != self.n:
            raise UsageError("Symmetric form must be square")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.matrix[i, j] != self.matrix[j, i]:
                    raise UsageError("Matrix is not symmetric")

    @classmethod
    def from_matrix(cls, m: RationalMatrix) -> "SymmetricForm":
        return cls(m.rows, m)

    @classmethod
    def diagonal(cls, entries: Sequence) -> "SymmetricForm":
        n = len(entries)
        return cls(n, RationalMatrix.from_rows(
            [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n
        ))

    @classmethod
    def from_polynomial(cls, n: int, terms: Mapping[Tuple[int, ...], Fraction]) -> "SymmetricForm":
        """
        Symmetrized matrix of a quadratic form given as exponent vector -> coefficient

        A cross term c x_i x_j contributes c/2 to both (i, j) and (j, i).
        """
        m = [[Fraction(0)] * n for _ in range(n)]
        for exps, coeff in terms.items():
            if len(exps) != n or sum(exps) != 2:
                raise UsageError(f"Monomial {exps} is not quadratic in {n} variables")
            idx = [i for i, e in enumerate(exps) for _ in range(e)]
            i, j = idx
            if i == j:
                m[i][i] += Fraction(coeff)
            else:
                m[i][j] += Fraction(coeff) / 2
                m[j][i] += Fraction(coeff) / 2
        return cls(n, RationalMatrix.from_rows(m, n))

    def congruent(self, u: RationalMatrix) -> "SymmetricForm":
        """The form U^T Q U"""
        return SymmetricForm(u.cols, u.transpose() @ self.matrix @ u)

    def rank(self) -> int:
        return self.matrix.rank()


def congruence_diagonalize(q: SymmetricForm) -> Tuple[List[Fraction], RationalMatrix]:
    """
    Symmetric Gaussian elimination: returns (diagonal, P) with P^T Q P = diag

    Each column operation on A is paired with the same row operation, and the
    same column operation is applied to P.
    """
    n = q.n
    a = [list(row) for row in q.matrix.entries]
    p = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def add_multiple(target: int, source: int, t: Fraction):
        # col_target += t col_source and row_target += t row_source
        for r in range(n):
            a[r][target] += t * a[r][source]
        for c in range(n):
            a[target][c] += t * a[source][c]
        for r in range(n):
            p[r][target] += t * p[r][source]

    def swap(i: int, j: int):
        a[i], a[j] = a[j], a[i]
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in p:
            row[i], row[j] = row[j], row[i]

    for i in range(n):
        if a[i][i] == 0:
            j = next((j for j in range(i + 1, n) if a[j][j] != 0), None)
            if j is not None:
                swap(i, j)
            else:
                j = next((j for j in range(i + 1, n) if a[i][j] != 0), None)
                if j is None:
                    continue
                # a[j][j] is zero here, so the new pivot is 2 a[i][j]
                add_multiple(i, j, Fraction(1))
        pivot = a[i][i]
        for j in range(i + 1, n):
            if a[i][j] != 0:
                add_multiple(j, i, -a[i][j] / pivot)

    diagonal = [a[i][i] for i in range(n)]
    return diagonal, RationalMatrix.from_rows(p, n)


def squarefree_part(r) -> int:
    """The squarefree integer s with r = s * (nonzero rational square)"""
    r = Fraction(r)
    if r == 0:
        raise ZeroInput("Squarefree part of zero is undefined")
    # n/d = n*d / d^2
    value = r.numerator * r.denominator
    sign = -1 if value < 0 else 1
    result = 1
    for p, e in factorint(abs(value)).items():
        if e % 2:
            result *= p
    return sign * result


def is_square(n: int) -> bool:
    return n >= 0 and squarefree_part(n) == 1 if n else True


class QuadricVerdict(str, Enum):
    RULED_OVER_Q = "RuledOverQ"
    RULED_OVER_FIELD = "RuledOverField"
    CONE_OVER_Q = "ConeOverQ"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class QuadricClassification:
    rank: int
    diagonal: Tuple[Fraction, ...]
    squarefree_disc: int
    verdict: QuadricVerdict

    @property
    def field(self) -> Optional[int]:
        """d for RuledOverField(d)"""
        return self.squarefree_disc if self.verdict is QuadricVerdict.RULED_OVER_FIELD else None

    @property
    def defined_over_q(self) -> bool:
        return self.verdict in (QuadricVerdict.RULED_OVER_Q, QuadricVerdict.CONE_OVER_Q)

    def describe(self) -> str:
        if self.verdict is QuadricVerdict.RULED_OVER_FIELD:
            return f"RuledOverField({self.squarefree_disc})"
        return self.verdict.value


def classify_quadric(q: SymmetricForm) -> QuadricClassification:
    """Ruled surface over Q / over Q(sqrt d), cone over Q, or degenerate"""
    if q.n not in (3, 4):
        raise PreconditionViolation(f"Quadric surfaces live in P^3; got a form in {q.n} variables")
    diagonal, _ = congruence_diagonalize(q)
    nonzero = [x for x in diagonal if x != 0]
    rank = len(nonzero)
    disc = squarefree_part(prod(nonzero, start=Fraction(1))) if nonzero else 1

    if q.n == 4 and rank == 4:
        verdict = QuadricVerdict.RULED_OVER_Q if disc == 1 else QuadricVerdict.RULED_OVER_FIELD
    elif rank == 3:
        verdict = QuadricVerdict.CONE_OVER_Q
    else:
        verdict = QuadricVerdict.DEGENERATE
    return QuadricClassification(rank, tuple(diagonal), disc, verdict)
