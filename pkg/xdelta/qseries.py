"""
Truncated q-series over Q and the q-expansion fixture format
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .cosets import build_coset_space, curve_invariants
from .errors import (
    BadHeader,
    DataFileMissing,
    FixtureSyntaxError,
    GenusMismatch,
    NotCuspidal,
    PrecisionMismatch,
    UsageError,
)
from .zmod import DeltaSubgroup, Level

logger = logging.getLogger(__name__)

FIXTURE_MAGIC = "qexp-fixture v1"


class QSeries:
    """
    A truncated q-series a_0 + a_1 q + ... + a_prec q^prec + O(q^(prec+1))

    Arithmetic between two series truncates to the smaller precision.
    """

    __slots__ = ("prec", "coeffs")

    def __init__(self, coeffs: Sequence, prec: Optional[int] = None):
        values = [Fraction(c) for c in coeffs]
        if prec is None:
            prec = len(values) - 1
        if prec < 0:
            raise UsageError("A q-series needs at least one coefficient")
        if len(values) > prec + 1:
            values = values[: prec + 1]
        elif len(values) < prec + 1:
            values += [Fraction(0)] * (prec + 1 - len(values))
        self.prec = prec
        self.coeffs: Tuple[Fraction, ...] = tuple(values)

    @classmethod
    def zero(cls, prec: int) -> "QSeries":
        return cls([], prec)

    @classmethod
    def one(cls, prec: int) -> "QSeries":
        return cls([1], prec)

    def __repr__(self):
        shown = ", ".join(str(c) for c in self.coeffs[:6])
        return f"QSeries(prec={self.prec}, coeffs=[{shown}{', ...' if self.prec > 5 else ''}])"

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.prec == other.prec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.prec, self.coeffs))

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n]

    def truncate(self, prec: int) -> "QSeries":
        return QSeries(self.coeffs[: prec + 1], min(prec, self.prec))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int:
        """Order of the first nonzero coefficient (prec + 1 for the zero series)"""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return self.prec + 1

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSeries((self.coeffs[0] + other,) + self.coeffs[1:], self.prec)
        prec = min(self.prec, other.prec)
        return QSeries([a + b for a, b in zip(self.coeffs[: prec + 1], other.coeffs)], prec)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return QSeries([-c for c in self.coeffs], self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSeries([c * other for c in self.coeffs], self.prec)
        return series_mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, power: int):
        if not isinstance(power, int) or power < 0:
            raise UsageError(f"Only nonnegative integer powers are supported, got {power!r}")
        result = QSeries.one(self.prec)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product truncated to min(a.prec, b.prec)"""
    prec = min(a.prec, b.prec)
    out = [Fraction(0)] * (prec + 1)
    for i, x in enumerate(a.coeffs[: prec + 1]):
        if x == 0:
            continue
        for j in range(prec + 1 - i):
            y = b.coeffs[j]
            if y:
                out[i + j] += x * y
    return QSeries(out, prec)


# =========================
# Rigor
# =========================

class Rigor(str, Enum):
    VERIFIED = "verified"
    HEURISTIC = "heuristic"
    CITED = "cited"


def sturm_bound(weight: int, mu: int) -> int:
    """floor(weight * mu / 12) + 1"""
    if weight < 2 or weight % 2 or mu < 1:
        raise UsageError(f"Sturm bound needs an even weight >= 2 and mu >= 1, got ({weight}, {mu})")
    return weight * mu // 12 + 1


def precision_rigor(prec: int, weight: int, mu: int) -> Rigor:
    """Relations of the given weight checked through q^prec are exact once prec reaches the Sturm bound"""
    bound = sturm_bound(weight, mu)
    rigor = Rigor.VERIFIED if prec >= bound else Rigor.HEURISTIC
    logger.debug("prec %d vs Sturm bound %d (weight %d, mu %d): %s", prec, bound, weight, mu, rigor.value)
    return rigor


# =========================
# Cusp form bases
# =========================

@dataclass(frozen=True)
class CuspFormBasis:
    level: Level
    delta: DeltaSubgroup
    forms: Tuple[QSeries, ...]
    declared_genus: int
    weight: int = 2
    source: str = "<memory>"

    @property
    def prec(self) -> int:
        return self.forms[0].prec if self.forms else 0

    @property
    def mu(self) -> int:
        return build_coset_space(self.level, self.delta).index

    def rigor(self, relation_degree: int) -> Rigor:
        """Rigor of a degree-d relation among the forms (weight 2d)"""
        return precision_rigor(self.prec, self.weight * relation_degree, self.mu)


def monomial_eval(basis: CuspFormBasis, exponents: Sequence[int]) -> QSeries:
    """Product of forms[i] ** exponents[i]; the empty product is the constant series 1"""
    if len(exponents) != len(basis.forms):
        raise UsageError(
            f"Monomial has {len(exponents)} exponents but the basis has {len(basis.forms)} forms"
        )
    result = QSeries.one(basis.prec)
    for form, e in zip(basis.forms, exponents):
        if e:
            result = result * form ** e
    return result


def validate_basis(
    level: Level, delta: DeltaSubgroup, forms: Sequence[QSeries], source: str = "<memory>"
) -> CuspFormBasis:
    """Check cuspidality, shared precision and the genus of X_Delta(N)"""
    computed = curve_invariants(build_coset_space(level, delta)).genus
    if len(forms) != computed:
        raise GenusMismatch(level.n, len(forms), computed)
    precs = {f.prec for f in forms}
    if len(precs) > 1:
        raise PrecisionMismatch(f"{source}: forms have unequal precisions {sorted(precs)}")
    for i, f in enumerate(forms, 1):
        if f.coeffs[0] != 0:
            raise NotCuspidal(f"{source}: form {i} has nonzero constant term {f.coeffs[0]}")
    return CuspFormBasis(level, delta, tuple(forms), computed, source=source)


# =========================
# Fixture format
# =========================

def _parse_rational(token: str, source: str, line_no: int) -> Fraction:
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise FixtureSyntaxError(source, line_no, f"bad coefficient {token!r}")


def parse_fixture(text: Union[str, bytes], source: str = "<fixture>") -> CuspFormBasis:
    """Parse a `qexp-fixture v1` document into a validated basis"""
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    header: Dict[str, List[str]] = {}
    form_lines: List[Tuple[int, List[str]]] = []
    seen_magic = False

    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not seen_magic:
            if line != FIXTURE_MAGIC:
                raise FixtureSyntaxError(source, line_no, f"expected {FIXTURE_MAGIC!r}")
            seen_magic = True
            continue
        keyword, *values = line.split()
        if keyword == "form":
            form_lines.append((line_no, values))
        elif keyword in ("level", "delta", "weight", "prec"):
            if keyword in header:
                raise FixtureSyntaxError(source, line_no, f"duplicate {keyword!r} line")
            if form_lines:
                raise FixtureSyntaxError(source, line_no, f"{keyword!r} after the first form")
            header[keyword] = values
            header[keyword + "@"] = [str(line_no)]
        else:
            raise FixtureSyntaxError(source, line_no, f"unknown keyword {keyword!r}")

    if not seen_magic:
        raise FixtureSyntaxError(source, 1, "empty fixture")
    for key in ("level", "delta", "weight", "prec"):
        if key not in header:
            raise BadHeader(f"{source}: missing {key!r} line")

    def header_int(key: str) -> int:
        values = header[key]
        line_no = int(header[key + "@"][0])
        if len(values) != 1:
            raise FixtureSyntaxError(source, line_no, f"{key!r} takes one integer")
        try:
            return int(values[0])
        except ValueError:
            raise FixtureSyntaxError(source, line_no, f"bad integer {values[0]!r}")

    n = header_int("level")
    weight = header_int("weight")
    prec = header_int("prec")
    if weight != 2:
        raise BadHeader(f"{source}: only weight 2 is supported, got {weight}")
    if n < 1 or prec < 1:
        raise BadHeader(f"{source}: level and prec must be positive")

    level = Level(n)
    delta_line = int(header["delta@"][0])
    try:
        residues = tuple(int(v) for v in header["delta"])
    except ValueError:
        raise FixtureSyntaxError(source, delta_line, "delta residues must be integers")
    try:
        delta = DeltaSubgroup(level, tuple(sorted(residues)))
    except UsageError as e:
        raise BadHeader(f"{source}: {e}")

    forms = []
    for line_no, values in form_lines:
        coeffs = [_parse_rational(v, source, line_no) for v in values]
        if len(coeffs) != prec + 1:
            raise PrecisionMismatch(
                f"{source}:{line_no}: expected {prec + 1} coefficients, found {len(coeffs)}"
            )
        forms.append(QSeries(coeffs, prec))

    basis = validate_basis(level, delta, forms, source)
    logger.debug("Parsed %s: N=%d delta=%s, %d forms, prec %d", source, n, delta, len(forms), prec)
    return basis


def render_fixture(basis: CuspFormBasis, comments: Iterable[str] = ()) -> str:
    lines = [FIXTURE_MAGIC]
    lines += [f"# {c}" for c in comments]
    lines.append(f"level {basis.level.n}")
    lines.append("delta " + " ".join(str(r) for r in basis.delta.residues))
    lines.append(f"weight {basis.weight}")
    lines.append(f"prec {basis.prec}")
    for form in basis.forms:
        lines.append("form " + " ".join(str(c) for c in form.coeffs))
    return "\n".join(lines) + "\n"


def load_fixture(path: Path) -> CuspFormBasis:
    path = Path(path)
    if not path.is_file():
        raise DataFileMissing(path)
    return parse_fixture(path.read_text(encoding="utf-8"), source=path.name)


def fixture_filename(basis: CuspFormBasis) -> str:
    """N<level>_delta<r1>-<r2>-...q<prec>.txt"""
    residues = "-".join(str(r) for r in basis.delta.residues)
    return f"N{basis.level.n}_delta{residues}q{basis.prec}.txt"


class FixtureIndex:
    """Highest-precision fixture per (N, Delta) found in a directory"""

    def __init__(self, bases: Iterable[CuspFormBasis] = ()):
        self._best: Dict[Tuple[int, Tuple[int, ...]], CuspFormBasis] = {}
        for basis in bases:
            self.add(basis)

    @classmethod
    def scan(cls, directory: Optional[Path]) -> "FixtureIndex":
        index = cls()
        if directory is None:
            return index
        directory = Path(directory)
        if not directory.is_dir():
            raise DataFileMissing(directory)
        for path in sorted(directory.glob("*.txt")):
            index.add(load_fixture(path))
        logger.debug("Fixture index over %s holds %d bases", directory, len(index))
        return index

    def add(self, basis: CuspFormBasis):
        key = (basis.level.n, basis.delta.residues)
        current = self._best.get(key)
        if current is None or basis.prec > current.prec:
            self._best[key] = basis

    def get(self, level: Level, delta: DeltaSubgroup) -> Optional[CuspFormBasis]:
        return self._best.get((level.n, delta.residues))

    def __len__(self):
        return len(self._best)
