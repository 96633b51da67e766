import json
import shutil

import pytest

from xdelta import __version__
from xdelta.main import main
from xdelta.petri import Polynomial, reduce_modulo_quadric
from xdelta.pipeline import Decision, Reason

from .conftest import CUBIC_26, DATA_DIR, FIXTURES_DIR, GOLDEN_DIR, QUADRIC_26


@pytest.fixture
def run(capsys):
    """Invoke the CLI and return stdout; warnings on stderr stay out of the result"""

    def invoke(*argv: str) -> str:
        code = main(list(argv))
        captured = capsys.readouterr()
        assert code == 0, captured.err
        return captured.out

    return invoke


def test_version(run):
    assert run("version") == f"xdelta {__version__}\n"


def test_subgroups_without_proper_delta(run):
    assert run("subgroups", "14").splitlines()[-1] == "N=14: no proper nontrivial Δ"


def test_subgroups_json(run):
    rows = json.loads(run("--format", "json", "subgroups", "13"))
    assert [row["order"] for row in rows] == [2, 4, 6, 12]
    assert rows[0]["is_trivial"] and rows[-1]["is_full"]


def test_subgroups_text(run):
    assert run("subgroups", "13").splitlines()[1] == "1,5,8,12  order=4"


def test_invariants_json(run):
    values = json.loads(run("invariants", "26", "--delta", "1,5", "--format", "json"))
    assert (values["mu"], values["genus"]) == (126, 4)
    assert values["delta"] == [1, 5, 21, 25]


def test_classify_quadric_from_matrix(run):
    out = run("classify-quadric", "--matrix", "1,0,0,0;0,1,0,0;0,0,-1,0;0,0,0,-5", "-f", "json")
    assert json.loads(out)["verdict"] == "RuledOverField(5)"


def test_classify_quadric_from_polynomial(run):
    values = json.loads(run("-f", "json", "classify-quadric", "--poly", "x*w - y*z + z^2"))
    assert values["verdict"] == "RuledOverQ"
    assert values["rank"] == 4


def test_model_from_fixture(run):
    fixture = FIXTURES_DIR / "N26_delta1-5-21-25q10.txt"
    payload = json.loads(run("model", "--fixture", str(fixture), "--format", "json"))
    assert payload["rigor"] == "heuristic"
    assert payload["relations"][1]["text"] == "x*w - y*z + z^2"
    assert payload["classification"]["verdict"] == "RuledOverQ"


def test_model_from_the_verified_fixture(run):
    fixture = FIXTURES_DIR / "N26_delta1-5-21-25q64.txt"
    payload = json.loads(run("model", "--fixture", str(fixture), "--format", "json"))
    assert payload["rigor"] == "verified"
    assert payload["kernel_dims"] == [1, 5]
    cubic = reduce_modulo_quadric(Polynomial.parse(CUBIC_26), Polynomial.parse(QUADRIC_26))
    assert [r["text"] for r in payload["relations"]] == [str(cubic), QUADRIC_26]


def test_classnumber_accepts_negative_discriminant(run):
    assert run("classnumber", "-148") == "2\n"
    assert run("classnumber", "-172") == "3\n"


def test_fixedpoints(run):
    assert run("fixedpoints", "43") == "4\n"


def test_decide_37(run):
    decision = Decision.model_validate_json(
        run("decide", "37", "--delta", "1,10,11,26,27,36", "--format", "json")
    )
    assert decision.reason is Reason.RAMIFICATION_OBSTRUCTION


def test_decide_text_mentions_the_reason(run):
    assert "SquareDegreeObstruction" in run("decide", "37", "--delta", "1,6")


def test_obstruct_37(run):
    payload = json.loads(run("obstruct", "37", "--delta", "1,10,11", "--format", "json"))
    assert payload["curves"][0]["ramification"]["reason"] == "RamificationParityViolation"


def test_survey_markdown_matches_golden(run):
    assert run("survey", "--format", "md") == (GOLDEN_DIR / "survey.md").read_text(encoding="utf-8")


def test_survey_json_validates(run):
    rows = json.loads(run("--format", "json", "survey", "--max-n", "30"))
    decisions = [Decision.model_validate(row) for row in rows]
    assert decisions[0].level == 13
    assert decisions[-1].reason is Reason.LEVEL_NOT_IN_S


def test_survey_without_fixtures_is_cited(run):
    rows = json.loads(run("--no-fixtures", "survey", "--max-n", "26", "-f", "json"))
    [row] = [r for r in rows if r["level"] == 26 and r["delta_index"] == 1]
    assert row["rigor"] == "cited"


def test_schema(run):
    assert "verdict" in json.loads(run("schema"))["properties"]


def test_facts_validate(run):
    lines = run("facts", "validate").splitlines()
    assert sum(line.startswith("ok  ") for line in lines) == 6
    assert "file  trigonal.tsv: gonality exactly 3" in lines
    assert "file  not_bielliptic.tsv: gonality above 3, not bielliptic" in lines


def test_facts_validate_json_names_every_file(run):
    payload = json.loads(run("facts", "validate", "--format", "json"))
    assert payload["status"] == "ok"
    assert sorted(payload["files"]) == sorted(path.name for path in DATA_DIR.iterdir() if path.is_file())


@pytest.mark.parametrize(
    "argv, code",
    [
        (["subgroups", "0"], 1),
        (["decide", "26", "--delta", "1,2"], 1),
        (["decide", "13", "--delta", "1"], 1),
        (["classnumber", "5"], 1),
        (["fixedpoints", "45"], 1),
        (["classify-quadric"], 1),
        (["classify-quadric", "--matrix", "1,0;0,1"], 1),
        (["model", "--fixture", "/nonexistent/fixture.txt"], 2),
        (["--data-dir", "/nonexistent", "facts", "validate"], 2),
        (["--max-n", "2", "survey"], 1),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code
    captured = capsys.readouterr()
    assert "Error" in captured.err
    assert captured.out == ""


def test_integrity_failure_exit_code(tmp_path, capsys):
    data = tmp_path / "data"
    shutil.copytree(DATA_DIR, data)
    path = data / "not_bielliptic.tsv"
    path.write_text(
        path.read_text(encoding="utf-8").replace("29\t1,12\t8\t", "29\t1,12\t9\t"), encoding="utf-8"
    )
    assert main(["--data-dir", str(data), "facts", "validate"]) == 3
    assert "Genus mismatch" in capsys.readouterr().err
