"""
xdelta - cubic points on intermediate modular curves X_Delta(N)
Main entry point and command line interface
"""
import logging
import platform
import sys
from pathlib import Path
from typing import List, Optional

import click
import typer
from typer.core import TyperGroup
from typer.main import get_command
from rich.console import Console
from rich.logging import RichHandler
from rich.text import Text

from . import __version__
from .config import OutputFormat, ReportConfig, config
from .cosets import covering_degrees, gamma0_invariants, invariants_of
from .errors import XDeltaError
from .exactalg import RationalMatrix, SymmetricForm, classify_quadric
from .facts import DATA_FILES, load_facts
from .petri import Polynomial, build_model
from .pipeline import decide, obstruct, survey
from .qseries import FixtureIndex, load_fixture
from .quadforms import atkin_lehner_fixed_points, quotient_genus, reduced_forms
from .report import (
    render_class_number,
    render_classification,
    render_decision,
    render_facts_report,
    render_fixed_points,
    render_invariants,
    render_model,
    render_obstruction,
    render_schema,
    render_subgroups,
    render_survey,
)
from .zmod import Level, enumerate_delta_subgroups, parse_residues

logger = logging.getLogger("xdelta")

# Diagnostics go to stderr; results are echoed to stdout untouched
err_console = Console(stderr=True, width=config.console_width, highlight=False)


class XDeltaGroup(TyperGroup):
    """Maps package errors to a red message on stderr and the family's exit code"""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except XDeltaError as e:
            err_console.print(Text.assemble(("Error: ", config.error_color), str(e)))
            logger.debug("Failure detail", exc_info=True)
            raise click.exceptions.Exit(e.exit_code)


app = typer.Typer(
    cls=XDeltaGroup,
    help="Decide which intermediate modular curves X_Delta(N) have infinitely many cubic points",
    no_args_is_help=True,
    add_completion=False,
)
facts_app = typer.Typer(help="Inspect the bundled facts", no_args_is_help=True)
app.add_typer(facts_app, name="facts")

FormatOption = typer.Option(None, "--format", "-f", help="text, json or md (overrides the global flag)")
DeltaOption = typer.Option(..., "--delta", "-d", help="Residues of Delta, e.g. 1,10,11 or 1,10,11,26,27,36")


# ---------- SETUP ----------

def setup_logging(level: str):
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_time=False, show_path=False)],
        force=True,
    )


def report_config(ctx: typer.Context) -> ReportConfig:
    if ctx.obj is None:
        ctx.obj = ReportConfig(data_dir=config.data_dir, fixtures_dir=config.fixtures_dir, max_n=config.max_n)
    return ctx.obj


def output_format(ctx: typer.Context, fmt: Optional[OutputFormat]) -> OutputFormat:
    return fmt if fmt is not None else report_config(ctx).format


def emit(text: str):
    typer.echo(text, nl=False)


def load_fixtures(settings: ReportConfig) -> FixtureIndex:
    return FixtureIndex.scan(settings.fixtures_dir)


@app.callback()
def cli(
    ctx: typer.Context,
    fmt: OutputFormat = typer.Option(config.output_format, "--format", "-f", help="Output format"),
    data_dir: Path = typer.Option(config.data_dir, "--data-dir", help="Directory with the bundled facts"),
    fixtures_dir: Path = typer.Option(config.fixtures_dir, "--fixtures-dir", help="Directory of q-expansion fixtures"),
    no_fixtures: bool = typer.Option(False, "--no-fixtures", help="Ignore q-expansion fixtures"),
    max_n: int = typer.Option(config.max_n, "--max-n", help="Largest level surveyed"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr"),
):
    """Cubic points on X_Delta(N)"""
    setup_logging("DEBUG" if verbose else config.log_level)
    try:
        ctx.obj = ReportConfig(
            format=fmt,
            data_dir=data_dir,
            fixtures_dir=None if no_fixtures else fixtures_dir,
            max_n=max_n,
        )
    except ValueError as e:
        raise click.BadParameter(str(e))
    if verbose:
        logger.debug(
            "xdelta %s on Python %s; data %s; fixtures %s",
            __version__, platform.python_version(), ctx.obj.data_dir, ctx.obj.fixtures_dir,
        )


# ---------- GROUP THEORY ----------

@app.command()
def subgroups(ctx: typer.Context, n: int = typer.Argument(..., help="Level N"), fmt: Optional[OutputFormat] = FormatOption):
    """List the subgroups of (Z/NZ)^x containing -1"""
    level = Level(n)
    emit(render_subgroups(level, enumerate_delta_subgroups(level), output_format(ctx, fmt)))


@app.command()
def invariants(
    ctx: typer.Context,
    n: int = typer.Argument(..., help="Level N"),
    delta: str = DeltaOption,
    fmt: Optional[OutputFormat] = FormatOption,
):
    """Index, elliptic points, cusps, genus and covering degrees of X_Delta(N)"""
    level = Level(n)
    group = parse_residues(level, delta)
    emit(render_invariants(
        level, group, invariants_of(level, group), covering_degrees(level, group), output_format(ctx, fmt)
    ))


# ---------- QUADRICS AND MODELS ----------

@app.command("classify-quadric")
def classify_quadric_command(
    ctx: typer.Context,
    matrix: Optional[str] = typer.Option(None, "--matrix", "-m", help='Symmetric matrix, rows split by ";"'),
    poly: Optional[str] = typer.Option(None, "--poly", "-p", help="Quadratic form in x, y, z, w"),
    fmt: Optional[OutputFormat] = FormatOption,
):
    """Classify the quadric surface of a symmetric matrix or quadratic form"""
    if (matrix is None) == (poly is None):
        raise click.UsageError("Give exactly one of --matrix and --poly")
    if matrix is not None:
        form = SymmetricForm.from_matrix(RationalMatrix.parse(matrix))
    else:
        form = Polynomial.parse(poly).symmetric_form()
    emit(render_classification(classify_quadric(form), output_format(ctx, fmt)))


@app.command()
def model(
    ctx: typer.Context,
    fixture: Path = typer.Option(..., "--fixture", help="q-expansion fixture file"),
    fmt: Optional[OutputFormat] = FormatOption,
):
    """Build the canonical model of a genus 3 or 4 curve from its fixture"""
    basis = load_fixture(fixture)
    bundled = load_facts(report_config(ctx).data_dir).genus4_model(basis.level, basis.delta)
    reference = Polynomial.parse(bundled.cubic) if bundled is not None else None
    emit(render_model(build_model(basis, reference), output_format(ctx, fmt)))


# ---------- ARITHMETIC ----------

@app.command(context_settings={"ignore_unknown_options": True})
def classnumber(
    ctx: typer.Context,
    d: int = typer.Argument(..., help="Negative discriminant D"),
    fmt: Optional[OutputFormat] = FormatOption,
):
    """Class number h(D) by enumerating reduced forms"""
    emit(render_class_number(d, reduced_forms(d), output_format(ctx, fmt)))


@app.command()
def fixedpoints(
    ctx: typer.Context,
    n: int = typer.Argument(..., help="Odd prime level N"),
    fmt: Optional[OutputFormat] = FormatOption,
):
    """Fixed points of the Atkin-Lehner involution w_N on X_0(N)"""
    fixed = atkin_lehner_fixed_points(n)
    genus_x0 = gamma0_invariants(Level(n)).genus
    emit(render_fixed_points(n, fixed, genus_x0, quotient_genus(genus_x0, fixed), output_format(ctx, fmt)))


@app.command("obstruct")
def obstruct_command(
    ctx: typer.Context,
    n: int = typer.Argument(..., help="Level N"),
    delta: str = DeltaOption,
    fmt: Optional[OutputFormat] = FormatOption,
):
    """Run the degree and ramification obstructions to a degree-3 map onto an elliptic curve"""
    settings = report_config(ctx)
    level = Level(n)
    group = parse_residues(level, delta)
    emit(render_obstruction(obstruct(level, group, load_facts(settings.data_dir)), output_format(ctx, fmt)))


# ---------- DECISIONS ----------

@app.command("decide")
def decide_command(
    ctx: typer.Context,
    n: int = typer.Argument(..., help="Level N"),
    delta: str = DeltaOption,
    fmt: Optional[OutputFormat] = FormatOption,
):
    """Decide whether X_Delta(N) has infinitely many cubic points"""
    settings = report_config(ctx)
    level = Level(n)
    decision = decide(level, parse_residues(level, delta), load_facts(settings.data_dir), load_fixtures(settings))
    emit(render_decision(decision, output_format(ctx, fmt)))


@app.command("survey")
def survey_command(
    ctx: typer.Context,
    max_n: Optional[int] = typer.Option(None, "--max-n", help="Largest level (default: global --max-n)"),
    jobs: int = typer.Option(config.jobs, "--jobs", "-j", help="Worker threads"),
    fmt: Optional[OutputFormat] = FormatOption,
):
    """Decide every X_Delta(N) with N up to max-n"""
    settings = report_config(ctx)
    if max_n is not None:
        settings = settings.model_copy(update={"max_n": max_n})
    decisions = survey(settings.max_n, load_facts(settings.data_dir), load_fixtures(settings), jobs=jobs)
    emit(render_survey(decisions, settings.max_n, output_format(ctx, fmt)))


@app.command()
def schema():
    """Print the JSON schema of a decision"""
    emit(render_schema())


@facts_app.command("validate")
def facts_validate(ctx: typer.Context, fmt: Optional[OutputFormat] = FormatOption):
    """Load the bundled facts and run every integrity check"""
    settings = report_config(ctx)
    bundle = load_facts(settings.data_dir)
    emit(render_facts_report(
        bundle.validation_report(), str(settings.data_dir), output_format(ctx, fmt), DATA_FILES
    ))


@app.command()
def version():
    """Show version information"""
    emit(f"xdelta {__version__}\n")


# ---------- ENTRY POINTS ----------

def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI on argv and return the exit code"""
    command = get_command(app)
    try:
        result = command.main(args=argv, prog_name="xdelta", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show(file=sys.stderr)
        return 1
    except click.exceptions.Abort:
        err_console.print("[yellow]Aborted.[/yellow]")
        return 1
    return result if isinstance(result, int) else 0


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
