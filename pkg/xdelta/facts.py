"""
Bundled facts: gonality tables, Jacobian ranks, elliptic curves, canonical models

Everything that cannot be recomputed here (gonality, biellipticity, ranks)
ships as tab-separated files with a citation per row. Loading validates the
files against invariants computed from scratch.

Files are named by content:

    set_s.txt               levels N where X_0(N) has infinitely many cubic points
    gonality_at_most_2.tsv  genus <= 1 or hyperelliptic
    trigonal.tsv            gonality exactly 3
    bielliptic.tsv          gonality above 3, bielliptic
    not_bielliptic.tsv      gonality above 3, not bielliptic
    genus4_models.tsv       canonical models of the trigonal genus-4 curves
    jacobian_ranks.tsv      rank of Jac(X_1(N))
    elliptic_curves.tsv     positive-rank curves and their modular parametrizations
"""
import csv
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, ValidationError

from .cosets import genus_of
from .errors import (
    ClassificationIntegrityFailure,
    CoverageFailure,
    DataFileMissing,
    GenusIntegrityFailure,
    ParseError,
    UsageError,
)
from .exactalg import classify_quadric
from .obstructions import EllipticTarget
from .petri import Polynomial
from .quadforms import x0_plus_datum
from .zmod import DeltaSubgroup, Level, proper_delta_subgroups

logger = logging.getLogger(__name__)

# Levels N with infinitely many cubic points on X_0(N)
LEVEL_SET_S = tuple(list(range(1, 30)) + [31, 32, 34, 36, 37, 43, 45, 49, 50, 54, 64, 81])

SET_S_FILE = "set_s.txt"
GONALITY_FILES = {
    "gonality_at_most_2.tsv": ("AtMost2", False),
    "trigonal.tsv": ("Exactly3", False),
    "bielliptic.tsv": ("GreaterThan3", True),
    "not_bielliptic.tsv": ("GreaterThan3", False),
}
JACOBIAN_FILE = "jacobian_ranks.tsv"
ELLIPTIC_FILE = "elliptic_curves.tsv"
MODELS_FILE = "genus4_models.tsv"

DATA_FILES = {
    SET_S_FILE: "levels N where X_0(N) has infinitely many cubic points",
    "gonality_at_most_2.tsv": "gonality at most 2: genus <= 1 or hyperelliptic",
    "trigonal.tsv": "gonality exactly 3",
    "bielliptic.tsv": "gonality above 3, bielliptic",
    "not_bielliptic.tsv": "gonality above 3, not bielliptic",
    MODELS_FILE: "canonical models of the trigonal genus-4 curves",
    JACOBIAN_FILE: "rank of Jac(X_1(N))",
    ELLIPTIC_FILE: "positive-rank curves and their modular parametrizations",
}


class GonalityClass(str, Enum):
    AT_MOST_2 = "AtMost2"
    EXACTLY_3 = "Exactly3"
    GREATER_THAN_3 = "GreaterThan3"


class JacobianRank(str, Enum):
    ZERO = "Zero"
    POSITIVE = "Positive"


class GonalityFact(BaseModel):
    level: int
    delta: Tuple[int, ...]
    gonality_class: GonalityClass
    hyperelliptic: bool = False
    bielliptic: bool = False
    printed_genus: int
    citation: str
    source: str

    model_config = {"frozen": True}

    @property
    def key(self) -> Tuple[int, Tuple[int, ...]]:
        return (self.level, self.delta)


class JacobianRankFact(BaseModel):
    level: int
    rank_of_jac_x1: JacobianRank
    citation: str

    model_config = {"frozen": True}


class EllipticCurveFact(BaseModel):
    label: str
    conductor: int
    rank: int
    has_cm: bool
    isogeny_class_size: int
    x0_plus_iso: Optional[int] = None
    citation: str

    model_config = {"frozen": True}

    def as_target(self) -> EllipticTarget:
        return EllipticTarget(
            label=self.label,
            conductor=self.conductor,
            rank=self.rank,
            has_cm=self.has_cm,
            isogeny_class_size=self.isogeny_class_size,
        )


class Genus4ModelFact(BaseModel):
    level: int
    delta: Tuple[int, ...]
    cubic: str
    quadric: str
    diagonal_form: str
    verdict: str
    citation: str

    model_config = {"frozen": True}


# =========================
# Parsing
# =========================

def _rows(path: Path) -> Iterator[Tuple[int, Dict[str, str]]]:
    """Yield (line number, row) for a tab-separated file with '#' comments and a header"""
    if not path.is_file():
        raise DataFileMissing(path)
    with path.open(encoding="utf-8", newline="") as handle:
        numbered = [
            (no, line) for no, line in enumerate(handle, 1)
            if line.strip() and not line.lstrip().startswith("#")
        ]
    if not numbered:
        raise ParseError(path.name, 1, "no header line")
    reader = csv.reader((line for _, line in numbered), delimiter="\t")
    header = next(reader)
    for (line_no, _), values in zip(numbered[1:], reader):
        if len(values) != len(header):
            raise ParseError(
                path.name, line_no, f"expected {len(header)} columns, found {len(values)}"
            )
        yield line_no, dict(zip(header, (v.strip() for v in values)))


def _yes_no(value: str, source: str, line_no: int) -> bool:
    if value not in ("yes", "no"):
        raise ParseError(source, line_no, f"expected yes/no, got {value!r}")
    return value == "yes"


def _int(value: str, source: str, line_no: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(source, line_no, f"expected an integer, got {value!r}")


def _delta(level: int, text: str, source: str, line_no: int) -> DeltaSubgroup:
    try:
        reps = [int(part) for part in text.split(",") if part.strip()]
        return DeltaSubgroup.from_pm(Level(level), reps)
    except (ValueError, UsageError) as e:
        raise ParseError(source, line_no, f"bad subgroup {text!r}: {e}")


def parse_level_set(path: Path) -> Tuple[int, ...]:
    if not path.is_file():
        raise DataFileMissing(path)
    members = set()
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0]
        for token in line.replace(",", " ").split():
            if "-" in token:
                lo, _, hi = token.partition("-")
                members.update(range(_int(lo, path.name, line_no), _int(hi, path.name, line_no) + 1))
            else:
                members.add(_int(token, path.name, line_no))
    return tuple(sorted(members))


def _load_gonality(data_dir: Path) -> List[GonalityFact]:
    facts = []
    for name, (gonality_class, bielliptic) in GONALITY_FILES.items():
        for line_no, row in _rows(data_dir / name):
            try:
                level = _int(row["level"], name, line_no)
                delta = _delta(level, row["delta"], name, line_no)
                facts.append(GonalityFact(
                    level=level,
                    delta=delta.residues,
                    gonality_class=gonality_class,
                    hyperelliptic=_yes_no(row["hyperelliptic"], name, line_no)
                    if "hyperelliptic" in row else False,
                    bielliptic=bielliptic,
                    printed_genus=_int(row["genus"], name, line_no),
                    citation=row["citation"],
                    source=name,
                ))
            except KeyError as e:
                raise ParseError(name, line_no, f"missing column {e}")
    return facts


def _load_jacobian_ranks(data_dir: Path) -> Dict[int, JacobianRankFact]:
    ranks: Dict[int, JacobianRankFact] = {}
    for line_no, row in _rows(data_dir / JACOBIAN_FILE):
        try:
            fact = JacobianRankFact(
                level=_int(row["level"], JACOBIAN_FILE, line_no),
                rank_of_jac_x1=row["rank"],
                citation=row["citation"],
            )
        except (KeyError, ValidationError) as e:
            raise ParseError(JACOBIAN_FILE, line_no, str(e))
        if fact.level in ranks:
            raise ParseError(JACOBIAN_FILE, line_no, f"duplicate level {fact.level}")
        ranks[fact.level] = fact
    return ranks


def _load_elliptic_curves(data_dir: Path) -> Dict[str, EllipticCurveFact]:
    curves: Dict[str, EllipticCurveFact] = {}
    for line_no, row in _rows(data_dir / ELLIPTIC_FILE):
        try:
            iso = row["x0_plus_iso"]
            fact = EllipticCurveFact(
                label=row["label"],
                conductor=_int(row["conductor"], ELLIPTIC_FILE, line_no),
                rank=_int(row["rank"], ELLIPTIC_FILE, line_no),
                has_cm=_yes_no(row["has_cm"], ELLIPTIC_FILE, line_no),
                isogeny_class_size=_int(row["isogeny_class_size"], ELLIPTIC_FILE, line_no),
                x0_plus_iso=None if iso == "-" else _int(iso, ELLIPTIC_FILE, line_no),
                citation=row["citation"],
            )
        except KeyError as e:
            raise ParseError(ELLIPTIC_FILE, line_no, f"missing column {e}")
        if fact.label in curves:
            raise ParseError(ELLIPTIC_FILE, line_no, f"duplicate label {fact.label}")
        if fact.conductor < 11:
            raise ParseError(ELLIPTIC_FILE, line_no, f"conductor {fact.conductor} is below 11")
        curves[fact.label] = fact
    return curves


def _load_models(data_dir: Path) -> Dict[Tuple[int, Tuple[int, ...]], Genus4ModelFact]:
    models = {}
    for line_no, row in _rows(data_dir / MODELS_FILE):
        try:
            level = _int(row["level"], MODELS_FILE, line_no)
            delta = _delta(level, row["delta"], MODELS_FILE, line_no)
            fact = Genus4ModelFact(
                level=level,
                delta=delta.residues,
                cubic=row["cubic"],
                quadric=row["quadric"],
                diagonal_form=row["diagonal_form"],
                verdict=row["verdict"],
                citation=row["citation"],
            )
        except KeyError as e:
            raise ParseError(MODELS_FILE, line_no, f"missing column {e}")
        models[(level, delta.residues)] = fact
    return models


# =========================
# Bundle
# =========================

@dataclass
class FactsBundle:
    level_set: Tuple[int, ...]
    gonality: Dict[Tuple[int, Tuple[int, ...]], GonalityFact]
    jacobian_ranks: Dict[int, JacobianRankFact]
    elliptic_curves: Dict[str, EllipticCurveFact]
    genus4_models: Dict[Tuple[int, Tuple[int, ...]], Genus4ModelFact]
    data_dir: Optional[Path] = None
    checks: List[str] = field(default_factory=list)

    def in_set_s(self, n: int) -> bool:
        return n in self.level_set

    def gonality_fact(self, level: Level, delta: DeltaSubgroup) -> Optional[GonalityFact]:
        return self.gonality.get((level.n, delta.residues))

    def jacobian_rank(self, level: Level) -> Optional[JacobianRankFact]:
        return self.jacobian_ranks.get(level.n)

    def genus4_model(self, level: Level, delta: DeltaSubgroup) -> Optional[Genus4ModelFact]:
        return self.genus4_models.get((level.n, delta.residues))

    def validation_report(self) -> List[str]:
        return list(self.checks)


def positive_rank_curves(level: Level, bundle: FactsBundle) -> List[EllipticCurveFact]:
    """Curves of positive rank whose conductor divides N, by label"""
    return sorted(
        (c for c in bundle.elliptic_curves.values() if c.rank > 0 and level.n % c.conductor == 0),
        key=lambda c: c.label,
    )


def _validate(bundle: FactsBundle):
    checks = bundle.checks

    if bundle.level_set != LEVEL_SET_S:
        raise CoverageFailure(
            f"{SET_S_FILE} lists {list(bundle.level_set)}, expected {list(LEVEL_SET_S)}"
        )
    checks.append(f"level set S has the expected {len(LEVEL_SET_S)} members")

    for fact in bundle.gonality.values():
        level = Level(fact.level)
        delta = DeltaSubgroup(level, fact.delta)
        computed = genus_of(level, delta)
        if computed != fact.printed_genus:
            raise GenusIntegrityFailure(fact.level, delta.label, fact.printed_genus, computed)
        if fact.hyperelliptic and fact.gonality_class is not GonalityClass.AT_MOST_2:
            raise ClassificationIntegrityFailure(
                f"N={fact.level}, delta={delta.label} is hyperelliptic but listed in {fact.source}"
            )
        if fact.level not in bundle.level_set:
            raise CoverageFailure(f"N={fact.level} in {fact.source} is not in S")
    checks.append(f"printed genus matches the computed genus for {len(bundle.gonality)} curves")

    expected = 0
    for n in bundle.level_set:
        level = Level(n)
        for delta in proper_delta_subgroups(level):
            expected += 1
            if (n, delta.residues) not in bundle.gonality:
                raise CoverageFailure(f"No gonality fact for N={n}, delta={delta.label}")
    if expected != len(bundle.gonality):
        raise CoverageFailure(
            f"Gonality tables hold {len(bundle.gonality)} curves, but S has {expected} proper subgroups"
        )
    checks.append(f"every proper subgroup for N in S ({expected} curves) has exactly one gonality fact")

    needs_model = {
        key for key, fact in bundle.gonality.items()
        if fact.gonality_class is GonalityClass.EXACTLY_3 and fact.printed_genus == 4
    }
    if needs_model != set(bundle.genus4_models):
        missing = sorted(needs_model - set(bundle.genus4_models))
        extra = sorted(set(bundle.genus4_models) - needs_model)
        raise CoverageFailure(f"Genus-4 models missing for {missing}, unexpected for {extra}")
    for key, model in sorted(bundle.genus4_models.items()):
        where = f"N={model.level}, delta={DeltaSubgroup(Level(model.level), model.delta).label}"
        quadric = classify_quadric(Polynomial.parse(model.quadric).symmetric_form())
        diagonal = classify_quadric(Polynomial.parse(model.diagonal_form).symmetric_form())
        if quadric.describe() != model.verdict or diagonal.describe() != model.verdict:
            raise ClassificationIntegrityFailure(
                f"{where}: quadric gives {quadric.describe()}, diagonal form gives "
                f"{diagonal.describe()}, table says {model.verdict}"
            )
        cubic = Polynomial.parse(model.cubic)
        if not cubic.is_homogeneous() or cubic.degree != 3:
            raise ClassificationIntegrityFailure(f"{where}: cubic {model.cubic!r} is not a cubic form")
    checks.append(f"{len(bundle.genus4_models)} genus-4 quadrics and diagonal forms reclassified")

    for curve in bundle.elliptic_curves.values():
        if curve.x0_plus_iso is None:
            continue
        if curve.x0_plus_iso != curve.conductor:
            raise ClassificationIntegrityFailure(
                f"{curve.label}: X_0^+({curve.x0_plus_iso}) cannot have conductor {curve.conductor}"
            )
        plus_genus = x0_plus_datum(Level(curve.x0_plus_iso)).genus_bottom
        if plus_genus != 1:
            raise ClassificationIntegrityFailure(
                f"{curve.label}: X_0^+({curve.x0_plus_iso}) has genus {plus_genus}, not 1"
            )
    checks.append("every X_0^+(N) elliptic curve has a genus-1 quotient")

    for n in sorted({f.level for f in bundle.gonality.values()}):
        rank = bundle.jacobian_ranks.get(n)
        positive = bool(positive_rank_curves(Level(n), bundle))
        if rank is not None and positive and rank.rank_of_jac_x1 is JacobianRank.ZERO:
            raise ClassificationIntegrityFailure(
                f"Jac(X_1({n})) has rank Zero but a positive-rank curve has conductor dividing {n}"
            )
    checks.append("Jacobian ranks agree with the positive-rank elliptic curves")


def load_facts(data_dir: Path) -> FactsBundle:
    data_dir = Path(data_dir)
    gonality: Dict[Tuple[int, Tuple[int, ...]], GonalityFact] = {}
    for fact in _load_gonality(data_dir):
        if fact.key in gonality:
            raise CoverageFailure(
                f"N={fact.level}, delta={fact.delta} appears in both "
                f"{gonality[fact.key].source} and {fact.source}"
            )
        gonality[fact.key] = fact

    bundle = FactsBundle(
        level_set=parse_level_set(data_dir / SET_S_FILE),
        gonality=gonality,
        jacobian_ranks=_load_jacobian_ranks(data_dir),
        elliptic_curves=_load_elliptic_curves(data_dir),
        genus4_models=_load_models(data_dir),
        data_dir=data_dir,
    )
    _validate(bundle)
    logger.debug("Loaded facts from %s: %s", data_dir, "; ".join(bundle.checks))
    return bundle
