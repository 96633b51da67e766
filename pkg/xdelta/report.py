"""
Report emitters: text tables, JSON documents and the markdown survey

Every renderer returns a string; the CLI decides where it goes. Text output is
rendered through a rich Console with a fixed width and no colour so identical
inputs produce identical bytes.
"""
import json
from io import StringIO
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from pydantic import BaseModel
from rich import box
from rich.console import Console
from rich.table import Table
from rich.text import Text

from .config import OutputFormat, config
from .cosets import CoveringChain, CurveInvariants
from .exactalg import QuadricClassification
from .petri import PetriModel, Polynomial
from .pipeline import Decision, ObstructionRun, Reason, Verdict
from .quadforms import BQF
from .zmod import DeltaSubgroup, Level

NO_PROPER_DELTA = "no proper nontrivial Δ"


# ---------- PLUMBING ----------

def _capture(*renderables) -> str:
    buffer = StringIO()
    console = Console(
        file=buffer,
        width=config.console_width,
        color_system=None,
        force_terminal=False,
        highlight=False,
        emoji=False,
    )
    for renderable in renderables:
        console.print(renderable)
    return buffer.getvalue()


def _table(title: str, columns: Sequence[str]) -> Table:
    table = Table(title=Text(title), box=box.SIMPLE_HEAD, title_justify="left")
    for column in columns:
        table.add_column(column)
    return table


def _add_row(table: Table, *cells):
    # Plain text cells; data may contain square brackets
    table.add_row(*(Text(str(cell)) for cell in cells))


def _json(payload: Any) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    elif isinstance(payload, list):
        payload = [p.model_dump(mode="json") if isinstance(p, BaseModel) else p for p in payload]
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def _md_table(columns: Sequence[str], rows: Iterable[Sequence[str]]) -> List[str]:
    lines = ["| " + " | ".join(columns) + " |", "|" + "|".join("---" for _ in columns) + "|"]
    lines += ["| " + " | ".join(row) + " |" for row in rows]
    return lines


def _key_values(title: str, values: Dict[str, Any]) -> str:
    table = _table(title, ["field", "value"])
    for key, value in values.items():
        _add_row(table, key, value)
    return _capture(table)


def _md_key_values(title: str, values: Dict[str, Any]) -> str:
    lines = [f"## {title}", ""]
    lines += _md_table(["field", "value"], ([k, str(v)] for k, v in values.items()))
    return "\n".join(lines) + "\n"


def _render_mapping(title: str, values: Dict[str, Any], fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _json(values)
    if fmt is OutputFormat.MD:
        return _md_key_values(title, values)
    return _key_values(title, values)


# ---------- SUBGROUPS AND INVARIANTS ----------

def render_subgroups(level: Level, subgroups: Sequence[DeltaSubgroup], fmt: OutputFormat) -> str:
    proper = [d for d in subgroups if not d.is_trivial and not d.is_full]
    rows = [
        {
            "order": d.order,
            "residues": list(d.residues),
            "is_trivial": d.is_trivial,
            "is_full": d.is_full,
        }
        for d in subgroups
    ]
    if fmt is OutputFormat.JSON:
        return _json(rows)

    lines = []
    for d in subgroups:
        flags = [flag for flag, on in (("trivial", d.is_trivial), ("full", d.is_full)) if on]
        residues = ",".join(str(r) for r in d.residues) or "-"
        lines.append(f"{residues}  order={d.order}" + (f"  [{', '.join(flags)}]" if flags else ""))
    if not proper:
        lines.append(f"N={level.n}: {NO_PROPER_DELTA}")
    return "\n".join(lines) + "\n"


def render_invariants(
    level: Level, delta: DeltaSubgroup, invariants: CurveInvariants, chain: CoveringChain, fmt: OutputFormat
) -> str:
    values = {
        "level": level.n,
        "delta": list(delta.residues) if fmt is OutputFormat.JSON else delta.label,
        "mu": invariants.mu,
        "nu2": invariants.nu2,
        "nu3": invariants.nu3,
        "nu_inf": invariants.nu_inf,
        "genus": invariants.genus,
        "deg_x1_to_delta": chain.deg_x1_to_delta,
        "deg_delta_to_x0": chain.deg_delta_to_x0,
        "deg_delta_to_x0_plus": chain.deg_delta_to_plus,
    }
    return _render_mapping(f"X_Delta({level.n}), Delta = {delta.label}", values, fmt)


# ---------- QUADRICS AND MODELS ----------

def _classification_values(cls: QuadricClassification, fmt: OutputFormat) -> Dict[str, Any]:
    diagonal = [str(d) for d in cls.diagonal]
    return {
        "rank": cls.rank,
        "diagonal": diagonal if fmt is OutputFormat.JSON else "(" + ", ".join(diagonal) + ")",
        "squarefree_disc": cls.squarefree_disc,
        "verdict": cls.describe(),
    }


def render_classification(cls: QuadricClassification, fmt: OutputFormat) -> str:
    return _render_mapping("Quadric classification", _classification_values(cls, fmt), fmt)


def _polynomial_terms(poly: Polynomial) -> List[Dict[str, Any]]:
    return [{"exponents": list(exps), "coefficient": str(c)} for exps, c in poly.terms]


def render_model(model: PetriModel, fmt: OutputFormat) -> str:
    cls = model.classification()
    if fmt is OutputFormat.JSON:
        payload = {
            "genus": model.genus,
            "source": model.source,
            "rigor": model.rigor.value,
            "kernel_dims": list(model.kernel_dims),
            "relations": [
                {"degree": r.degree, "text": str(r), "terms": _polynomial_terms(r)} for r in model.relations
            ],
            "classification": _classification_values(cls, fmt) if cls is not None else None,
        }
        return _json(payload)

    values: Dict[str, Any] = {"genus": model.genus, "source": model.source, "rigor": model.rigor.value}
    if model.kernel_dims:
        values["kernel_dims"] = ", ".join(str(k) for k in model.kernel_dims)
    for relation in model.relations:
        values[f"degree {relation.degree}"] = str(relation)
    if cls is not None:
        values.update({f"quadric {k}": v for k, v in _classification_values(cls, fmt).items()})
    return _render_mapping("Canonical model", values, fmt)


# ---------- CLASS NUMBERS AND FIXED POINTS ----------

def render_class_number(d: int, forms: Sequence[BQF], fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _json({"discriminant": d, "class_number": len(forms), "forms": [[f.a, f.b, f.c] for f in forms]})
    if fmt is OutputFormat.MD:
        return _md_key_values(
            f"h({d})", {"class_number": len(forms), "forms": ", ".join(str(f) for f in forms)}
        )
    return f"{len(forms)}\n"


def render_fixed_points(n: int, fixed: int, genus_x0: int, genus_plus: int, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.TEXT:
        return f"{fixed}\n"
    values = {"level": n, "fixed_points": fixed, "genus_x0": genus_x0, "genus_x0_plus": genus_plus}
    return _render_mapping(f"w_{n} on X_0({n})", values, fmt)


# ---------- OBSTRUCTIONS ----------

def render_obstruction(run: ObstructionRun, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _json(run)

    degrees = {
        "level": run.level,
        "delta": run.delta_label,
        "point degree": run.point_degree,
        "deg X_1 -> X_Delta": run.deg_x1_to_delta,
        "deg X_Delta -> X_0": run.deg_delta_to_x0,
        "deg X_Delta -> X_0^+": run.deg_delta_to_plus,
        "genus X_1": run.genus_x1,
    }
    for entry in run.curves:
        degrees[f"{entry.curve} square degree"] = entry.square_degree.describe()
        for key, value in entry.setup.items():
            degrees[f"{entry.curve} {key.replace('_', ' ')}"] = value
        if entry.ramification is not None:
            degrees[f"{entry.curve} ramification"] = entry.ramification.describe()
    if not run.curves:
        degrees["targets"] = "no positive-rank elliptic curve has conductor dividing N"
    degrees["obstructed"] = "yes" if run.obstructed else "no"
    return _render_mapping(f"Obstructions for X_Delta({run.level})", degrees, fmt)


# ---------- DECISIONS ----------

def _delta_cell(decision: Decision) -> str:
    return f"Δ{decision.delta_index} {decision.delta_label}"


def _rigor_cell(decision: Decision) -> str:
    return decision.rigor.value if decision.rigor is not None else "-"


def render_decision(decision: Decision, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _json(decision)

    if fmt is OutputFormat.MD:
        lines = [
            f"## X_Delta({decision.level}), {_delta_cell(decision)}",
            "",
            f"**{decision.verdict.value}**: {decision.reason_text} (genus {decision.genus}, "
            f"rigor {_rigor_cell(decision)})",
            "",
        ]
        lines += _md_table(
            ["step", "kind", "detail", "citation"],
            ([s.step, s.kind.value, s.detail, s.citation or "-"] for s in decision.evidence),
        )
        return "\n".join(lines) + "\n"

    table = _table(
        f"N={decision.level}, {_delta_cell(decision)}: {decision.verdict.value} ({decision.reason_text})",
        ["step", "kind", "detail", "citation"],
    )
    for step in decision.evidence:
        _add_row(table, step.step, step.kind.value, step.detail, step.citation or "")
    return _capture(table)


def render_survey(decisions: Sequence[Decision], max_n: int, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _json(list(decisions))
    if fmt is OutputFormat.MD:
        return _survey_markdown(decisions, max_n)

    table = _table(f"Cubic points on X_Delta(N), N <= {max_n}", ["N", "Δ", "genus", "verdict", "reason", "rigor"])
    for d in decisions:
        _add_row(table, d.level, _delta_cell(d), d.genus, d.verdict.value, d.reason_text, _rigor_cell(d))
    return _capture(table)


def _survey_markdown(decisions: Sequence[Decision], max_n: int) -> str:
    """Only levels in S get rows; the rest are covered by one sentence"""
    in_scope = [d for d in decisions if d.reason is not Reason.LEVEL_NOT_IN_S]
    columns = ["N", "Δ", "genus", "reason", "rigor"]

    def rows(verdict: Verdict):
        for d in in_scope:
            if d.verdict is verdict:
                yield [str(d.level), _delta_cell(d), str(d.genus), d.reason_text, _rigor_cell(d)]

    lines = [f"# Cubic points on X_Delta(N), N <= {max_n}", "", "## Infinitely many cubic points", ""]
    lines += _md_table(columns, rows(Verdict.INFINITE))
    lines += ["", "## Finitely many cubic points", ""]
    lines += _md_table(columns, rows(Verdict.FINITE))
    lines += [
        "",
        f"For every other N <= {max_n}, X_0(N) has finitely many cubic points, "
        "and so does every X_Delta(N) above it.",
    ]
    return "\n".join(lines) + "\n"


# ---------- FACTS ----------

def render_facts_report(
    checks: Sequence[str], data_dir: str, fmt: OutputFormat, files: Optional[Mapping[str, str]] = None
) -> str:
    files = dict(files or {})
    if fmt is OutputFormat.JSON:
        return _json({"data_dir": data_dir, "status": "ok", "checks": list(checks), "files": files})
    if fmt is OutputFormat.MD:
        lines = [f"## Facts in {data_dir}", ""] + [f"- {check}" for check in checks]
        if files:
            lines += ["", "### Files", ""] + [f"- `{name}`: {role}" for name, role in files.items()]
        return "\n".join(lines) + "\n"
    lines = [f"ok  {check}" for check in checks]
    lines += [f"file  {name}: {role}" for name, role in files.items()]
    return "\n".join(lines) + "\n"


def render_schema() -> str:
    """JSON schema that every decision document validates against"""
    return json.dumps(Decision.model_json_schema(), indent=2, ensure_ascii=False) + "\n"
