"""Command line front.

Exit codes: 0 success (including validation that finds only warnings),
1 validation errors or any model/engine failure, 2 usage errors. Every
subcommand takes ``--json`` for machine-readable output. Model files
may be ``.vdt`` (textual) or ``.json``/``.vdt.json`` (interchange).
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .diagnostics import Severity
from .dsl import emit_text, parse_file
from .engine import Bindings, evaluate, sensitivity as run_sensitivity, what_if
from .errors import VdmnError
from .interchange import emit_interchange, parse_interchange_file
from .model import Model
from .registry import load_corpus, load_dir
from .render import to_dot, to_svg
from .transform import apply_tree_cut, extract_subtree
from .validator import coverage_report, validate as run_validate


def _echo_json(payload: dict) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


def _fail(json_mode: bool, error: str, detail: str, payload: dict | None = None) -> None:
    if json_mode:
        body = {"error": error, "detail": detail}
        if payload:
            body.update(payload)
        click.echo(json.dumps(body, indent=2, sort_keys=True), err=True)
        sys.exit(1)
    raise click.ClickException(f"{error}: {detail}")


def _parse_result(path: str):
    p = Path(path)
    if p.suffix == ".json":
        return parse_interchange_file(p)
    return parse_file(p)


def _load_model(path: str, json_mode: bool) -> Model:
    result = _parse_result(path)
    errors = [d for d in result.diagnostics if d.severity is Severity.ERROR]
    if errors or result.model is None:
        if json_mode:
            click.echo(
                json.dumps(
                    {"error": "ParseFailed",
                     "diagnostics": [d.to_json_dict() for d in result.diagnostics]},
                    indent=2, sort_keys=True),
                err=True,
            )
            sys.exit(1)
        for d in result.diagnostics:
            click.echo(d.render(), err=True)
        raise click.ClickException(f"cannot load '{path}'")
    return result.model


def _parse_assignments(pairs: tuple[str, ...], option: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep or not key:
            raise click.BadParameter(f"expected ID=NUMBER, got '{pair}'", param_hint=option)
        try:
            out[key] = float(raw)
        except ValueError:
            raise click.BadParameter(f"'{raw}' is not a number", param_hint=option)
    return out


def _format_value(value: float | None) -> str:
    if value is None:
        return "n/a"
    return f"{value:g}"


@click.group()
@click.version_option(package_name="vdmn")
def main() -> None:
    """Model, validate, evaluate and render value driver trees."""


@main.command("validate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "json_mode", is_flag=True, help="JSON output.")
def validate_cmd(file: str, json_mode: bool) -> None:
    """Report structural findings; exit 1 only on errors."""
    result = _parse_result(file)
    parse_diags = list(result.diagnostics)
    findings = run_validate(result.model) if result.model is not None else []
    error_count = sum(1 for d in parse_diags if d.severity is Severity.ERROR) + sum(
        1 for d in findings if d.severity is Severity.ERROR
    )
    warning_count = (
        len(parse_diags) + len(findings) - error_count
    )
    if json_mode:
        _echo_json(
            {
                "file": file,
                "parse_diagnostics": [d.to_json_dict() for d in parse_diags],
                "diagnostics": [d.to_json_dict() for d in findings],
                "errors": error_count,
                "warnings": warning_count,
            }
        )
    else:
        for d in parse_diags:
            click.echo(d.render())
        for d in findings:
            click.echo(d.render())
        click.echo(f"{error_count} error(s), {warning_count} warning(s)")
    if error_count:
        sys.exit(1)


@main.command("eval")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--bind", "binds", multiple=True, metavar="ID=NUMBER",
              help="Bind a leaf value; repeatable.")
@click.option("--result-type", default="actual", show_default=True)
@click.option("--division-by-zero", type=click.Choice(["raise", "mark"]),
              default="raise", show_default=True)
@click.option("--json", "json_mode", is_flag=True, help="JSON output.")
def eval_cmd(file: str, binds: tuple[str, ...], result_type: str,
             division_by_zero: str, json_mode: bool) -> None:
    """Evaluate the tree bottom-up and print every indicator value."""
    model = _load_model(file, json_mode)
    bindings = Bindings(_parse_assignments(binds, "--bind"), result_type)
    try:
        valuation = evaluate(model, bindings, result_type=result_type,
                             division_by_zero=division_by_zero)
    except VdmnError as exc:
        _fail(json_mode, type(exc).__name__, str(exc))
    if json_mode:
        _echo_json(valuation.to_json_dict())
        return
    root = valuation.root_id
    click.echo(f"{root} = {_format_value(valuation.value(root))}  [root]")
    for iid in sorted(model.by_id):
        if iid == root:
            continue
        reason = valuation.reason(iid)
        if reason is not None:
            click.echo(f"{iid}: n/a ({reason.reason.value})")
        else:
            click.echo(f"{iid} = {_format_value(valuation.value(iid))}")
    for gateway, choice in sorted(valuation.gateway_choices.items()):
        click.echo(f"gateway {gateway} -> {choice}")


@main.command("whatif")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--bind", "binds", multiple=True, metavar="ID=NUMBER",
              help="Base scenario bindings; repeatable.")
@click.option("--set", "sets", multiple=True, metavar="ID=NUMBER", required=True,
              help="Override a driver; repeatable.")
@click.option("--result-type", default="actual", show_default=True)
@click.option("--json", "json_mode", is_flag=True, help="JSON output.")
def whatif_cmd(file: str, binds: tuple[str, ...], sets: tuple[str, ...],
               result_type: str, json_mode: bool) -> None:
    """Apply overrides and report every indicator that moved."""
    model = _load_model(file, json_mode)
    base = Bindings(_parse_assignments(binds, "--bind"), result_type)
    overrides = Bindings(_parse_assignments(sets, "--set"), result_type)
    try:
        report = what_if(model, base, overrides, result_type=result_type)
    except VdmnError as exc:
        _fail(json_mode, type(exc).__name__, str(exc))
    if json_mode:
        _echo_json(report.to_json_dict())
        return
    for entry in report.entries:
        suffix = " [root]" if entry.indicator_id == report.root_id else ""
        percent = f", {entry.percent:+.2f}%" if entry.percent is not None else ""
        delta = f"{entry.delta:+g}" if entry.delta is not None else "n/a"
        click.echo(
            f"{entry.indicator_id}: {_format_value(entry.base)} -> "
            f"{_format_value(entry.new)} ({delta}{percent}){suffix}"
        )


@main.command("sensitivity")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--bind", "binds", multiple=True, metavar="ID=NUMBER",
              help="Scenario bindings; repeatable.")
@click.option("--epsilon", default=1e-3, show_default=True,
              help="Relative nudge applied to each driver.")
@click.option("--result-type", default="actual", show_default=True)
@click.option("--json", "json_mode", is_flag=True, help="JSON output.")
def sensitivity_cmd(file: str, binds: tuple[str, ...], epsilon: float,
                    result_type: str, json_mode: bool) -> None:
    """Rank drivers by their influence on the root indicator."""
    model = _load_model(file, json_mode)
    bindings = Bindings(_parse_assignments(binds, "--bind"), result_type)
    try:
        report = run_sensitivity(model, bindings, result_type=result_type,
                                 epsilon=epsilon)
    except VdmnError as exc:
        _fail(json_mode, type(exc).__name__, str(exc))
    if json_mode:
        _echo_json(report.to_json_dict())
        return
    click.echo(f"root {report.root_id} = {report.root_value:g} "
               f"(epsilon {report.epsilon:g})")
    for rank, entry in enumerate(report.entries, start=1):
        elasticity = (
            f"{entry.elasticity:+.4f}" if entry.elasticity is not None else "   n/a "
        )
        tag = "" if entry.controllable else "  [external]"
        click.echo(
            f"{rank:>3}. {entry.driver_id:<24} base {entry.base_value:<12g} "
            f"d/unit {entry.delta_per_unit:+.6g}  elasticity {elasticity}{tag}"
        )


@main.command("render")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["dot", "svg"]), default="dot",
              show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Write here instead of stdout.")
@click.option("--show-operators/--no-operators", default=True, show_default=True)
@click.option("--show-levels/--no-levels", default=True, show_default=True)
@click.option("--show-clusters/--no-clusters", default=True, show_default=True)
@click.option("--values/--no-values", default=False, show_default=True,
              help="Embed evaluated values (svg only).")
@click.option("--json", "json_mode", is_flag=True, help="JSON output (wraps the text).")
def render_cmd(file: str, fmt: str, out: str | None, show_operators: bool,
               show_levels: bool, show_clusters: bool, values: bool,
               json_mode: bool) -> None:
    """Emit a DOT or standalone SVG diagram."""
    model = _load_model(file, json_mode)
    try:
        if fmt == "dot":
            text = to_dot(model, show_operators=show_operators,
                          show_levels=show_levels, show_clusters=show_clusters)
        else:
            valuation = evaluate(model, division_by_zero="mark") if values else None
            text = to_svg(model, show_operators=show_operators,
                          show_levels=show_levels, show_clusters=show_clusters,
                          valuation=valuation)
    except VdmnError as exc:
        _fail(json_mode, type(exc).__name__, str(exc))
    if out:
        Path(out).write_text(text, encoding="utf-8")
        if json_mode:
            _echo_json({"format": fmt, "out": out, "bytes": len(text)})
        else:
            click.echo(f"wrote {fmt} to {out}")
    elif json_mode:
        _echo_json({"format": fmt, "text": text})
    else:
        click.echo(text, nl=False)


@main.command("coverage")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--json", "json_mode", is_flag=True, help="JSON output.")
def coverage_cmd(directory: str, json_mode: bool) -> None:
    """Audit which notation constructs a directory of models uses."""
    try:
        registry = load_dir(directory)
        report = coverage_report([registry.models[n] for n in registry.names()])
    except VdmnError as exc:
        _fail(json_mode, type(exc).__name__, str(exc))
    if json_mode:
        _echo_json(report.to_json_dict())
        return
    used = {tag: n for tag, n in report.counts.items() if n}
    click.echo(f"{report.model_count} model(s), {len(used)} of "
               f"{len(report.counts)} constructs used")
    for tag in sorted(used):
        click.echo(f"  {tag:<24} {used[tag]}")
    if report.unused:
        click.echo("unused: " + ", ".join(report.unused))


@main.command("extract")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--node", required=True, help="Boundary indicator id.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Defaults to the input file's directory.")
@click.option("--json", "json_mode", is_flag=True, help="JSON output.")
def extract_cmd(file: str, node: str, out_dir: str | None, json_mode: bool) -> None:
    """Split the tree at a node into an extracted model and a remainder."""
    model = _load_model(file, json_mode)
    try:
        extracted, remainder = extract_subtree(model, node)
    except VdmnError as exc:
        _fail(json_mode, type(exc).__name__, str(exc))
    base = Path(out_dir) if out_dir else Path(file).parent
    base.mkdir(parents=True, exist_ok=True)
    stem = Path(file).name
    for suffix in (".vdt.json", ".vdt", ".json"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
            break
    extracted_path = base / f"{node}.vdt"
    remainder_path = base / f"{stem}.remainder.vdt"
    extracted_path.write_text(emit_text(extracted), encoding="utf-8")
    remainder_path.write_text(emit_text(remainder), encoding="utf-8")
    if json_mode:
        _echo_json({"extracted": str(extracted_path), "remainder": str(remainder_path)})
    else:
        click.echo(f"wrote {extracted_path}")
        click.echo(f"wrote {remainder_path}")


@main.command("cut")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--node", required=True, help="Indicator to cut at.")
@click.option("--label", required=True, help="Reference label left on the node.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write here instead of stdout.")
@click.option("--json", "json_mode", is_flag=True, help="JSON output.")
def cut_cmd(file: str, node: str, label: str, out: str | None, json_mode: bool) -> None:
    """Prune everything only reachable through a node; keep a reference."""
    model = _load_model(file, json_mode)
    try:
        transformed = apply_tree_cut(model, node, label)
    except VdmnError as exc:
        _fail(json_mode, type(exc).__name__, str(exc))
    if file.endswith(".json"):
        text = emit_interchange(transformed)
    else:
        text = emit_text(transformed)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        if json_mode:
            _echo_json({"out": out, "kept": len(transformed.indicators)})
        else:
            click.echo(f"wrote {out}")
    elif json_mode:
        _echo_json({"text": text, "kept": len(transformed.indicators)})
    else:
        click.echo(text, nl=False)


@main.command("serve")
@click.argument("directory", required=False,
                type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve_cmd(directory: str | None, host: str, port: int) -> None:
    """Serve the HTTP API over a model directory.

    Without a directory argument, VDMN_MODEL_DIR is used when set;
    otherwise the packaged demonstration models are served.
    """
    import uvicorn

    from .service import create_app

    target = directory or os.environ.get("VDMN_MODEL_DIR")
    try:
        registry = load_dir(target) if target else load_corpus()
    except VdmnError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"serving {', '.join(registry.names())} on http://{host}:{port}")
    uvicorn.run(create_app(registry), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
