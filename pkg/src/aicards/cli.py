"""Command-line access: interactive wizard, scripted builds, validation,
format conversion, and the HTTP service.

Exit codes follow one contract everywhere: 0 when the card is responsible,
1 when it is valid but not responsible (or the user aborted), 2 on parse,
usage, or other operational failures.
"""

from __future__ import annotations

import datetime as dt
import json
import sys
from pathlib import Path

import click

from . import questionnaire as q
from .card import Card, finalize
from .codecs import FORMATS, LOSSLESS_FORMATS
from .errors import (
    AicardsError,
    DecodeError,
    IncompleteCardError,
    IncompleteSessionError,
    PayloadInvalidError,
    ScriptError,
    TaxonomyError,
)
from .render import field_list
from .taxonomy import load_taxonomy, register_taxonomy
from .validator import assess, report_to_dict

ALL_FORMATS = tuple(FORMATS)


def _fail(message: str, code: int = 2):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_formats(value: str) -> list[str]:
    names = [v.strip() for v in value.split(",") if v.strip()]
    if not names:
        raise click.UsageError("--format needs at least one format")
    for name in names:
        if name not in FORMATS:
            raise click.UsageError(
                f"unknown format {name!r} (choose from {', '.join(ALL_FORMATS)})")
    return names


def _decode_file(path: Path) -> Card:
    suffix = path.suffix.lstrip(".").lower()
    if suffix not in LOSSLESS_FORMATS:
        _fail(f"cannot parse {path.name!r}: expected a {', '.join(LOSSLESS_FORMATS)} card")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        _fail(str(exc))
    try:
        return FORMATS[suffix].decode(text)
    except DecodeError as exc:
        _fail(f"{path.name}: {exc}")


def _write_exports(card: Card, out_dir: Path, formats: list[str]) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in formats:
        fmt = FORMATS[name]
        target = out_dir / f"card{fmt.extension}"
        target.write_text(fmt.encode(card), encoding="utf-8", newline="")
        written.append(target)
    return written


def _print_report(card: Card, as_json: bool) -> int:
    report = assess(card)
    if as_json:
        click.echo(json.dumps(report_to_dict(report), indent=2, ensure_ascii=False))
    else:
        for result in report.dimensions:
            status = "satisfied" if result.satisfied else "NOT satisfied"
            click.echo(f"{result.dimension.value}: {status}")
            for finding in result.findings:
                severity = finding.severity.value
                click.echo(f"  [{severity}] {finding.code} at {finding.path}: "
                           f"{finding.message}")
        click.echo("responsible: " + ("yes" if report.responsible else "no"))
    return 0 if report.responsible else 1


@click.group()
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="Register a custom taxonomy document.")
def main(taxonomy_path: Path | None):
    """Create, validate, convert, and serve AI Usage Cards."""
    if taxonomy_path is not None:
        try:
            register_taxonomy(load_taxonomy(taxonomy_path.read_text(encoding="utf-8")))
        except TaxonomyError as exc:
            raise click.UsageError(f"--taxonomy: {exc}")


# -- interactive wizard ---------------------------------------------------------

def _prompt_dates() -> list[str]:
    while True:
        raw = click.prompt("  dates used (YYYY-MM-DD, comma separated)",
                           default="", show_default=False)
        dates = [d.strip() for d in raw.split(",") if d.strip()]
        try:
            for d in dates:
                dt.date.fromisoformat(d)
        except ValueError:
            click.echo("  not an ISO date, try again")
            continue
        return dates


def _prompt_models(step: q.Step) -> list[dict]:
    click.echo(step.prompt)
    models = []
    while True:
        name = click.prompt("model name (blank when done)", default="",
                            show_default=False).strip()
        if not name:
            return models
        dates = _prompt_dates()
        version = click.prompt("  version (blank if unknown)", default="",
                               show_default=False).strip()
        models.append({"name": name, "dates_used": dates,
                       "version": version or None})


def _prompt_choices(prompt: str, options: list[dict]) -> list[str]:
    click.echo(prompt)
    for i, option in enumerate(options, start=1):
        line = f"  {i}. {option['title']}"
        if option.get("description"):
            line += f" - {option['description']}"
        click.echo(line)
    while True:
        raw = click.prompt("select numbers (e.g. 1,3; blank for none)",
                           default="", show_default=False)
        picks = [p.strip() for p in raw.split(",") if p.strip()]
        try:
            indexes = sorted({int(p) for p in picks})
        except ValueError:
            click.echo("numbers only, try again")
            continue
        if any(not 1 <= i <= len(options) for i in indexes):
            click.echo("out of range, try again")
            continue
        return [options[i - 1]["id"] for i in indexes]


def _prompt_for(step: q.Step) -> object:
    schema = step.schema
    if step.kind is q.StepKind.MODEL_INFO:
        return _prompt_models(step)
    if step.kind in (q.StepKind.MAIN_CATEGORIES, q.StepKind.SUBCATEGORY_SELECT):
        return _prompt_choices(step.prompt, schema["options"])
    if step.kind is q.StepKind.MODEL_ASSIGNMENT:
        click.echo(step.prompt)
        assignment = []
        for model in schema["models"]:
            ids = _prompt_choices(f"where was {model['name']} used?",
                                  schema["options"])
            assignment.append(ids)
        return assignment
    if step.kind is q.StepKind.SUBCATEGORY_DETAIL:
        click.echo(step.prompt)
        allowed = schema["allowed_classifications"]
        classification = allowed[0] if len(allowed) == 1 else click.prompt(
            f"classification ({'/'.join(allowed)})", default=allowed[0])
        detail = click.prompt("detail")
        return {"used": True, "classifications": [classification],
                "detail": detail}
    if step.kind is q.StepKind.ETHICS:
        click.echo(step.prompt)
        return {field["key"]: click.prompt(field["title"], default="",
                                           show_default=False)
                for field in schema["fields"]}
    if step.kind is q.StepKind.APPROVAL:
        return click.confirm(schema["title"], default=False)
    if step.kind is q.StepKind.PROJECT_DETAILS:
        click.echo(step.prompt)
        correspondences = []
        while True:
            name = click.prompt("correspondence name (blank when done)",
                                default="", show_default=False).strip()
            if not name:
                break
            correspondences.append({
                "name": name,
                "contact": click.prompt("  contact"),
                "affiliation": click.prompt("  affiliation", default="",
                                            show_default=False),
            })
        project_name = click.prompt("project name")
        applications = click.prompt("key applications (comma separated)",
                                    default="", show_default=False)
        return {
            "correspondences": correspondences,
            "project_name": project_name,
            "key_applications": [a.strip() for a in applications.split(",")
                                 if a.strip()],
        }
    raise AssertionError(f"no prompt for {step.kind}")


@main.command()
@click.option("--taxonomy-version", default="1.0", show_default=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path),
              default=None, envvar="AICARDS_OUT",
              help="Output directory (default: AICARDS_OUT or cwd).")
@click.option("--format", "format_spec", default=",".join(ALL_FORMATS),
              show_default=True, help="Comma-separated formats to write.")
@click.option("--save-answers", type=click.Path(path_type=Path), default=None,
              help="Also record the answers as a replayable script.")
def new(taxonomy_version: str, out_dir: Path | None, format_spec: str,
        save_answers: Path | None):
    """Create a card interactively."""
    formats = _parse_formats(format_spec)
    try:
        session = q.start(taxonomy_version)
    except TaxonomyError as exc:
        _fail(str(exc))
    recorded: list[q.Answer] = []
    try:
        while True:
            step = q.current_step(session)
            if step.kind is q.StepKind.REVIEW:
                break
            payload = _prompt_for(step)
            answer = q.Answer(kind=step.kind, param=step.param, payload=payload)
            try:
                session = q.submit_answer(session, answer)
            except PayloadInvalidError as exc:
                click.echo(f"invalid answer: {exc}", err=True)
                continue
            recorded.append(answer)
        click.echo("")
        for item in field_list(q.build_card(session)):
            value = item["value"].replace("\n", "; ")
            click.echo(f"{item['label'].upper()}: {value}")
        if not click.confirm("finalize this card?", default=True):
            raise click.Abort()
    except (click.Abort, EOFError, KeyboardInterrupt):
        click.echo("aborted, nothing written", err=True)
        sys.exit(1)
    try:
        _, card = q.finalize_session(session)
    except IncompleteSessionError as exc:
        click.echo(f"incomplete card ({exc.revisit_step} must be revisited):", err=True)
        for path, message in exc.problems:
            click.echo(f"  {path}: {message}", err=True)
        sys.exit(1)
    out_dir = out_dir or Path(".")
    if save_answers is not None:
        script = q.AnswerScript(taxonomy_version=taxonomy_version,
                                answers=tuple(recorded))
        save_answers.write_text(q.serialize_script(script), encoding="utf-8")
    for path in _write_exports(card, out_dir, formats):
        click.echo(f"wrote {path}")
    sys.exit(_print_report(card, as_json=False))


@main.command()
@click.argument("answers_file", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", type=click.Path(path_type=Path),
              default=None, envvar="AICARDS_OUT")
@click.option("--format", "format_spec", default=",".join(ALL_FORMATS),
              show_default=True)
@click.option("--json", "as_json", is_flag=True, default=False,
              help="Print the validation report as JSON.")
def build(answers_file: Path, out_dir: Path | None, format_spec: str, as_json: bool):
    """Replay an answer script and write the exports."""
    formats = _parse_formats(format_spec)
    try:
        script = q.load_script(answers_file.read_text(encoding="utf-8"))
        _, card = q.replay(script)
    except ScriptError as exc:
        _fail(str(exc))
    except IncompleteSessionError as exc:
        _fail(f"incomplete script, revisit {exc.revisit_step}: {exc}")
    except AicardsError as exc:
        _fail(str(exc))
    for path in _write_exports(card, out_dir or Path("."), formats):
        click.echo(f"wrote {path}")
    sys.exit(_print_report(card, as_json))


@main.command()
@click.argument("card_file", type=click.Path(exists=True, path_type=Path))
@click.option("--json", "as_json", is_flag=True, default=False,
              help="Print the validation report as JSON.")
def validate(card_file: Path, as_json: bool):
    """Assess a card file (json, xml, or csv)."""
    card = _decode_file(card_file)
    sys.exit(_print_report(card, as_json))


@main.command()
@click.argument("input_file", type=click.Path(exists=True, path_type=Path))
@click.option("--to", "target", required=True,
              type=click.Choice(ALL_FORMATS), help="Target format.")
@click.option("-o", "--output", type=click.Path(path_type=Path), default=None,
              help="Output file (default: stdout).")
def convert(input_file: Path, target: str, output: Path | None):
    """Convert a lossless card file into any format."""
    card = _decode_file(input_file)
    if target in ("bib", "tex"):
        try:
            card = finalize(card)
        except IncompleteCardError as exc:
            _fail(f"{target} export needs a complete card: {exc}")
    text = FORMATS[target].encode(card)
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text, encoding="utf-8", newline="")
        click.echo(f"wrote {output}", err=True)


@main.command()
@click.option("--listen", default=None, help="host:port (default AICARDS_LISTEN).")
@click.option("--data-dir", type=click.Path(path_type=Path), default=None)
@click.option("--ui-dir", type=click.Path(exists=True, path_type=Path), default=None)
def serve(listen: str | None, data_dir: Path | None, ui_dir: Path | None):
    """Run the HTTP service (configured via AICARDS_* variables)."""
    from .service import ServiceConfig, serve as run

    config = ServiceConfig.from_env()
    if listen:
        host, _, port = listen.rpartition(":")
        config.host, config.port = host or "127.0.0.1", int(port)
    if data_dir is not None:
        config.data_dir = data_dir
    if ui_dir is not None:
        config.ui_dir = ui_dir
    run(config)


if __name__ == "__main__":
    main()
