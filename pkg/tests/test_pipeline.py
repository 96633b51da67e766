import pytest
from pydantic import ValidationError

from xdelta import pipeline
from xdelta.config import OutputFormat
from xdelta.errors import PreconditionViolation, UsageError
from xdelta.facts import LEVEL_SET_S, load_facts
from xdelta.pipeline import (
    Decision,
    EvidenceKind,
    Reason,
    Verdict,
    decide,
    obstruct,
    survey,
    survey_targets,
)
from xdelta.petri import Polynomial, reduce_modulo_quadric
from xdelta.qseries import FixtureIndex, Rigor
from xdelta.report import render_survey
from xdelta.zmod import DeltaSubgroup, Level, subgroup_closure

from .conftest import CUBIC_26, DATA_DIR, GOLDEN_DIR, QUADRIC_26

INFINITE = {
    (13, (1, 5)), (13, (1, 3, 4)), (15, (1, 4)), (16, (1, 7)), (17, (1, 4)), (17, (1, 2, 4, 8)),
    (19, (1, 7, 8)), (20, (1, 9)), (21, (1, 4, 5)), (24, (1, 5)), (24, (1, 7)), (24, (1, 11)),
    (25, (1, 4, 6, 9, 11)), (26, (1, 5)), (26, (1, 3, 9)), (27, (1, 8, 10)), (28, (1, 13)),
    (28, (1, 3, 9)), (29, (1, 4, 5, 6, 7, 9, 13)), (32, (1, 7, 9, 15)), (36, (1, 11, 13)),
    (37, (1, 6, 8, 10, 11, 14)), (37, (1, 3, 4, 7, 9, 10, 11, 12, 16)),
    (49, (1, 6, 8, 13, 15, 20, 22)), (50, (1, 9, 11, 19, 21)),
}


def _delta(n, reps):
    level = Level(n)
    return level, DeltaSubgroup.from_pm(level, reps)


@pytest.fixture(scope="module")
def decisions(bundle, fixtures):
    return survey(81, bundle, fixtures)


@pytest.mark.parametrize(
    "n, reps, reason, detail",
    [
        (13, (1, 5), Reason.GENUS_AT_MOST_ONE, None),
        (21, (1, 8), Reason.HYPERELLIPTIC_RANK_ZERO, None),
        (24, (1, 5), Reason.TRIGONAL_GENUS_3, None),
        (25, (1, 7), Reason.NOT_TRIGONAL_OVER_Q_RANK_ZERO, "RuledOverField(5)"),
        (28, (1, 3, 9), Reason.TRIGONAL_GENUS_4_QUADRIC, "ConeOverQ"),
        (29, (1, 12), Reason.NO_POSITIVE_RANK_CURVE, None),
        (32, (1, 15), Reason.BIELLIPTIC_RANK_ZERO, None),
        (37, (1, 6), Reason.SQUARE_DEGREE_OBSTRUCTION, None),
        (37, (1, 10, 11), Reason.RAMIFICATION_OBSTRUCTION, None),
        (43, (1, 6, 7), Reason.SQUARE_DEGREE_OBSTRUCTION, None),
        (30, (1, 11), Reason.LEVEL_NOT_IN_S, None),
    ],
)
def test_decide(bundle, n, reps, reason, detail):
    level, delta = _delta(n, reps)
    decision = decide(level, delta, bundle)
    assert decision.reason is reason
    assert decision.reason_detail == detail
    assert decision.evidence


def test_26_with_bundled_fixtures_is_verified(bundle, fixtures):
    level, delta = _delta(26, (1, 5))
    decision = decide(level, delta, bundle, fixtures)
    assert decision.verdict is Verdict.INFINITE
    assert decision.reason_text == "TrigonalGenus4Quadric(RuledOverQ)"
    assert decision.rigor is Rigor.VERIFIED
    [model] = [s for s in decision.evidence if s.step == "model"]
    assert "prec 64, verified" in model.detail
    assert f"quadric {QUADRIC_26}" in model.detail
    assert str(reduce_modulo_quadric(Polynomial.parse(CUBIC_26), Polynomial.parse(QUADRIC_26))) in model.detail
    assert [s.detail for s in decision.evidence if s.step == "cross-check"] == [
        "bundled model quadric agrees: RuledOverQ",
        "bundled cubic agrees modulo the quadric",
    ]
    assert [s.step for s in decision.evidence if s.kind is EvidenceKind.COMPUTED][-1] == "quadric"


def test_26_with_the_short_fixture_is_heuristic(bundle, basis_26):
    level, delta = _delta(26, (1, 5))
    decision = decide(level, delta, bundle, FixtureIndex([basis_26]))
    assert decision.reason_text == "TrigonalGenus4Quadric(RuledOverQ)"
    assert decision.rigor is Rigor.HEURISTIC
    [cubic] = [s for s in decision.evidence if s.step == "cubic"]
    assert cubic.kind is EvidenceKind.CITED
    [model] = [s for s in decision.evidence if s.step == "model"]
    assert str(reduce_modulo_quadric(Polynomial.parse(CUBIC_26), Polynomial.parse(QUADRIC_26))) in model.detail


def test_26_without_fixture_is_cited(bundle):
    level, delta = _delta(26, (1, 5))
    assert decide(level, delta, bundle).rigor is Rigor.CITED


def test_evidence_cites_imported_facts(bundle):
    level, delta = _delta(37, (1, 10, 11))
    decision = decide(level, delta, bundle)
    cited = [s for s in decision.evidence if s.kind is EvidenceKind.CITED]
    assert cited and all(s.citation for s in cited)
    steps = [s.step for s in decision.evidence]
    assert steps[0] == "genus"
    assert "ramification" in steps


@pytest.mark.parametrize("reps", [(1,), tuple(range(1, 13))])
def test_decide_rejects_improper_delta(bundle, reps):
    level = Level(13)
    delta = subgroup_closure(level, reps)
    with pytest.raises(PreconditionViolation):
        decide(level, delta, bundle)


def test_decide_rejects_delta_from_another_level(bundle):
    with pytest.raises(UsageError):
        decide(Level(26), DeltaSubgroup.from_pm(Level(13), (1, 5)), bundle)


def test_small_surveys(bundle):
    assert survey(12, bundle) == []
    assert survey_targets(12) == []
    with pytest.raises(UsageError):
        survey(2, bundle)


def test_infinite_set(decisions):
    infinite = {
        (d.level, tuple(r for r in d.delta if 2 * r < d.level)) for d in decisions
        if d.verdict is Verdict.INFINITE
    }
    assert infinite == INFINITE


def test_survey_is_exhaustive(decisions):
    expected = [(level.n, delta.residues) for level, delta in survey_targets(81)]
    assert [(d.level, tuple(d.delta)) for d in decisions] == expected
    assert all(d.reason is Reason.LEVEL_NOT_IN_S for d in decisions if d.level not in LEVEL_SET_S)
    assert sum(d.level in LEVEL_SET_S for d in decisions) == 50


def test_finite_below_implies_finite_above(decisions):
    # Delta' contained in Delta gives a map X_Delta'(N) -> X_Delta(N)
    by_level = {}
    for d in decisions:
        by_level.setdefault(d.level, []).append(d)
    for rows in by_level.values():
        for big in rows:
            if big.verdict is not Verdict.FINITE:
                continue
            for small in rows:
                if set(small.delta) < set(big.delta):
                    assert small.verdict is Verdict.FINITE, (small.level, small.delta_label)


def test_parallel_survey_matches_sequential(bundle, fixtures, decisions):
    assert survey(81, bundle, fixtures, jobs=4) == decisions


def test_survey_markdown_matches_golden(decisions):
    golden = (GOLDEN_DIR / "survey.md").read_text(encoding="utf-8")
    assert render_survey(decisions, 81, OutputFormat.MD) == golden


def test_survey_is_reproducible(bundle, fixtures, decisions):
    again = survey(81, load_facts(DATA_DIR), fixtures)
    assert render_survey(again, 81, OutputFormat.JSON) == render_survey(decisions, 81, OutputFormat.JSON)


def test_decision_rejects_contradictory_verdict():
    with pytest.raises(ValidationError):
        Decision(
            level=13, delta=[1, 5, 8, 12], delta_label="{±1, ±5}", delta_index=1, genus=0,
            verdict=Verdict.FINITE, reason=Reason.GENUS_AT_MOST_ONE,
        )


def test_decision_json_round_trip(bundle):
    level, delta = _delta(43, (1, 2, 4, 8, 11, 16, 21))
    decision = decide(level, delta, bundle)
    assert Decision.model_validate_json(decision.model_dump_json()) == decision


def test_obstruct_37(bundle):
    level, delta = _delta(37, (1, 10, 11))
    run = obstruct(level, delta, bundle)
    assert (run.deg_x1_to_delta, run.deg_delta_to_x0, run.deg_delta_to_plus) == (3, 6, 12)
    assert run.obstructed
    [entry] = run.curves
    assert not entry.square_degree.obstructed
    assert entry.ramification.obstructed
    assert entry.setup["known_ramification"] == 12
    assert entry.setup["allowed_ramification"] == 18


def test_obstruct_without_targets(bundle):
    level, delta = _delta(29, (1, 12))
    run = obstruct(level, delta, bundle)
    assert run.curves == []
    assert not run.obstructed


def test_obstruct_37_uses_the_pinned_setup(bundle, monkeypatch):
    calls = []
    pinned = pipeline.ramification_setup_37

    def record(**kwargs):
        calls.append(kwargs)
        return pinned(**kwargs)

    monkeypatch.setattr(pipeline, "ramification_setup_37", record)
    level, delta = _delta(37, (1, 10, 11))
    assert obstruct(level, delta, bundle).obstructed
    assert calls == [{"deg_alpha": 4}]
