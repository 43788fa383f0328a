"""Operator command line: serve the gateway, replay headless scenarios,
export boards, validate data files.

Exit codes: 0 success, 1 data or validation failure, 2 usage error.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from .adapt import UserProfile
from .boards import export_boards
from .errors import PictobridgeError, ScriptError, UnknownScenario
from .lexicon import load_catalog, validate_catalog_file
from .simrobot import parse_script, run_script, transcript_lines

DATA_DIR_ENV = "PICTOBRIDGE_DATA_DIR"


def _data_dir(option_value: str | None) -> str | None:
    return os.environ.get(DATA_DIR_ENV) or option_value


@click.group()
def main() -> None:
    """Communication-board gateway for a simulated robot."""


@main.command()
@click.option("--port", type=click.IntRange(1, 65535), default=8080, show_default=True)
@click.option("--bind", default="127.0.0.1", show_default=True)
@click.option("--scenario", default="warehouse", show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--board-dir", type=click.Path(file_okay=False), default="boards", show_default=True)
@click.option("--data-dir", type=click.Path(file_okay=False), default=None,
              help=f"Profile/feedback storage (or ${DATA_DIR_ENV}).")
@click.option("--ui-dir", type=click.Path(file_okay=False), default=None,
              help="Static UI bundle served at /.")
@click.option("--tick-hz", type=click.FloatRange(min=0.1), default=2.0, show_default=True,
              help="Simulator tick rate.")
@click.option("--no-auto-adjust", is_flag=True, help="Disable feedback-driven detail lowering.")
def serve(port, bind, scenario, seed, board_dir, data_dir, ui_dir, tick_hz, no_auto_adjust):
    """Run the gateway, simulator and dialogue loop."""
    import uvicorn

    from .gateway import build_app
    from .runtime import Runtime

    try:
        runtime = Runtime(
            scenario=scenario,
            seed=seed,
            auto_adjust_enabled=not no_auto_adjust,
            tick_hz=tick_hz,
            board_dir=board_dir,
            data_dir=_data_dir(data_dir),
        )
    except UnknownScenario as exc:
        raise click.ClickException(f"unknown scenario: {exc}")
    runtime.ensure_boards()
    app = build_app(runtime, ui_dir=ui_dir)
    runtime.start()
    click.echo(f"pictobridge gateway on http://{bind}:{port} (scenario={scenario}, seed={seed})")
    try:
        uvicorn.run(app, host=bind, port=port, log_level="warning")
    except SystemExit as exc:
        raise click.ClickException(f"server failed to start: {exc}")
    finally:
        runtime.stop()


@main.group()
def scenario() -> None:
    """Headless scenario runs."""


@scenario.command("run")
@click.argument("name")
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--script", "script_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--ticks", type=click.IntRange(min=0), default=120, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Transcript file (JSON lines); stdout when omitted.")
@click.option("--detail", type=click.Choice(["basic", "standard", "expert"]), default="standard",
              show_default=True, help="Initial profile detail level.")
@click.option("--no-auto-adjust", is_flag=True)
@click.option("--plot-dir", type=click.Path(file_okay=False), default=None,
              help="Also render trajectory/timeline figures into this directory.")
def scenario_run(name, seed, script_path, ticks, out_path, detail, no_auto_adjust, plot_dir):
    """Replay NAME deterministically and write the transcript."""
    entries = []
    if script_path:
        try:
            entries = parse_script(Path(script_path).read_text("utf-8"))
        except ScriptError as exc:
            click.echo(f"script error: {exc}", err=True)
            sys.exit(1)
    try:
        result = run_script(
            name,
            seed,
            entries,
            ticks,
            profile=UserProfile(detail=detail),
            auto_adjust_enabled=not no_auto_adjust,
        )
    except UnknownScenario as exc:
        click.echo(f"unknown scenario: {exc}", err=True)
        sys.exit(1)
    except PictobridgeError as exc:
        click.echo(f"run failed: {exc}", err=True)
        sys.exit(1)
    text = transcript_lines(result.transcript)
    if out_path:
        Path(out_path).write_text(text, "utf-8")
        click.echo(f"wrote {len(result.transcript)} transcript entries to {out_path}")
    else:
        click.echo(text, nl=False)
    if plot_dir:
        from .report import render_run_figures

        for fig_path in render_run_figures(result, plot_dir):
            click.echo(f"wrote {fig_path}")


@main.group()
def boards() -> None:
    """Board generation and export."""


@boards.command("export")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="boards", show_default=True)
@click.option("--langs", default="en,es", show_default=True, help="Comma-separated language codes.")
def boards_export(out_dir, langs):
    """Write the three board files."""
    catalog = load_catalog()
    languages = [lang.strip() for lang in langs.split(",") if lang.strip()]
    unknown = [lang for lang in languages if lang not in catalog.languages]
    if unknown:
        click.echo(f"undeclared languages: {', '.join(unknown)}", err=True)
        sys.exit(1)
    for path in export_boards(out_dir, languages, catalog):
        click.echo(f"wrote {path}")


@main.group()
def lexicon() -> None:
    """Concept catalog tools."""


@lexicon.command("validate")
@click.option("--file", "catalog_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Catalog file; defaults to the shipped catalog.")
def lexicon_validate(catalog_path):
    """Check every catalog invariant."""
    if catalog_path is None:
        from importlib import resources

        with resources.as_file(resources.files("pictobridge.data").joinpath("catalog.json")) as p:
            violations = validate_catalog_file(p)
    else:
        violations = validate_catalog_file(catalog_path)
    if violations:
        for violation in violations:
            click.echo(violation, err=True)
        sys.exit(1)
    click.echo("catalog ok")


if __name__ == "__main__":
    main()
