"""Command-line shell: KB validation, batch diagnosis, evaluation, serving."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import CaseInputError, FramedxError, KBInvariantError
from .evaluation import (
    ChiSquareResult,
    ContingencyTable,
    build_contingency,
    chi_square,
    expected_frequencies,
    homogeneity_verdict,
    observed_chances,
    parse_outcome_lines,
    prf_metrics,
    standard_deviation,
)
from .inference import parse_case
from .kb import load_kb_file, validate_kb
from .pipeline import DEFAULT_EPSILON, diagnose, render_json, report_payload

DEFAULT_CRITICALS = (14.845, 21.026)


@click.group()
def main() -> None:
    """Frame-based diagnostic inference engine."""


@main.group()
def kb() -> None:
    """Knowledge-base management."""


@kb.command("validate")
@click.argument("path", type=click.Path(path_type=Path))
@click.option("--strict", is_flag=True, help="Also warn about unused catalog values.")
def kb_validate(path: Path, strict: bool) -> None:
    """Load PATH and report every violated invariant."""
    try:
        loaded = load_kb_file(path)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except KBInvariantError as exc:
        click.echo(exc.report.format())
        sys.exit(1)
    except FramedxError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    report = validate_kb(loaded, strict=strict)
    click.echo(report.format())
    sys.exit(0 if report.ok else 1)


@main.command()
@click.option("--kb", "kb_path", required=True, type=click.Path(path_type=Path))
@click.option("--case", "case_path", required=True, type=click.Path(path_type=Path))
@click.option("--epsilon", default=DEFAULT_EPSILON, show_default=True,
              help="Conflict threshold on adjacent chances.")
@click.option("--json", "as_json", is_flag=True, help="Emit machine-readable JSON.")
def diagnose_cmd(kb_path: Path, case_path: Path, epsilon: float, as_json: bool) -> None:
    """Diagnose one case file, or every *.json case in a directory."""
    try:
        knowledge = load_kb_file(kb_path)
    except (OSError, FramedxError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    batch = case_path.is_dir()
    files = sorted(case_path.glob("*.json")) if batch else [case_path]
    failures = 0
    for path in files:
        try:
            patient = parse_case(path.read_text(encoding="utf-8"), knowledge.catalog)
            report = diagnose(knowledge, patient, epsilon)
        except (OSError, CaseInputError, FramedxError) as exc:
            failures += 1
            if as_json:
                click.echo(render_json(_error_entry(path, exc)) if batch
                           else render_json({"error": _error_detail(exc)}))
            click.echo(f"error in {path.name}: {exc}", err=True)
            if not batch:
                sys.exit(1)
            continue
        payload = report_payload(report, knowledge)
        if as_json:
            line = render_json({"case_file": path.name, "result": payload}) if batch \
                else render_json(payload)
            click.echo(line)
        else:
            _print_report(path, payload, batch)
    sys.exit(1 if failures else 0)


main.add_command(diagnose_cmd, name="diagnose")


def _error_detail(exc: Exception) -> dict:
    detail = {"message": str(exc)}
    if isinstance(exc, CaseInputError) and exc.attribute is not None:
        detail.update(attribute=exc.attribute, value=exc.value, allowed=exc.allowed)
    return detail


def _error_entry(path: Path, exc: Exception) -> dict:
    return {"case_file": path.name, "error": _error_detail(exc)}


def _print_report(path: Path, payload: dict, batch: bool) -> None:
    if batch:
        click.echo(f"== {path.name}")
    click.echo(
        f"patient {payload['patient_id']}  "
        f"phases={','.join(payload['phases_performed'])}  "
        f"divisor={payload['divisor_used']}"
    )
    for entry in payload["differential"]:
        classes = " ".join(
            f"{phase[:4]}:{cls}" for phase, cls in entry["match_class_per_phase"].items()
        )
        click.echo(
            f"  {entry['chance']:<8.4f} {entry['disease']:<24} "
            f"{entry['display_name']}  [{classes}]"
        )
    for conflict in payload["conflicts"]:
        group = ",".join(conflict["group"])
        if conflict["resolved"]:
            joints = ", ".join(
                f"{d}={v:.6g}" for d, v in conflict["joints"].items()
            )
            note = " (tie)" if conflict["tie"] else ""
            click.echo(
                f"  conflict {{{group}}} resolved -> "
                f"{' > '.join(conflict['order'])}{note}  joints: {joints}"
            )
        else:
            click.echo(f"  conflict {{{group}}} UNRESOLVED: {conflict['reason']}")


@main.command()
@click.option("--pairs", "pairs_path", required=True, type=click.Path(path_type=Path),
              help="JSON-lines file, one expert/software outcome pair per line.")
@click.option("--tables", "tables_path", type=click.Path(path_type=Path),
              help="Optional contingency-table JSON (expert and software counts).")
@click.option("--critical", "criticals", multiple=True, type=float,
              help="Critical values for the homogeneity verdict.")
@click.option("--mu", default=0.75, show_default=True,
              help="Acceptance level for the deviation statistic.")
@click.option("--threshold", default=0.75, show_default=True,
              help="Chance threshold for software predictions.")
@click.option("--json", "as_json", is_flag=True, help="Emit the full JSON report.")
def evaluate(pairs_path: Path, tables_path: Path | None, criticals: tuple[float, ...],
             mu: float, threshold: float, as_json: bool) -> None:
    """Compute the validation statistics over recorded outcome pairs."""
    criticals = criticals or DEFAULT_CRITICALS
    try:
        lines = pairs_path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    pairs, skipped = parse_outcome_lines(lines)
    for warning in skipped:
        click.echo(f"warning: skipped {warning}", err=True)
    if not pairs:
        click.echo("error: no valid outcome pairs", err=True)
        sys.exit(1)

    observed = observed_chances(pairs)
    report: dict = {
        "sd": {
            "mu": mu,
            "n": len(observed),
            "paper": standard_deviation(observed, mu, "paper"),
            "population": standard_deviation(observed, mu, "population"),
        },
        "metrics": None,
        "chi_square": None,
        "tables": None,
    }
    metrics = prf_metrics(pairs, threshold=threshold)
    report["metrics"] = {
        "recall": metrics.recall,
        "precision": metrics.precision,
        "accuracy": metrics.accuracy,
        "per_patient": [
            {
                "patient_id": m.patient_id,
                "recall": m.recall,
                "precision": m.precision,
                "accuracy": m.accuracy,
            }
            for m in metrics.per_patient
        ],
    }

    tables = _load_tables(tables_path) if tables_path else _tables_from_pairs(pairs, threshold)
    if tables is not None:
        expert_table, software_table = tables
        expected = expected_frequencies(expert_table)
        result = chi_square(software_table, expected)
        report["chi_square"] = {
            "statistic": result.statistic,
            "df": result.df,
            "homogeneous_at": [
                {"critical": c, "homogeneous": homogeneity_verdict(result.statistic, result.df, c)}
                for c in criticals
            ],
        }
        report["tables"] = {
            "row_labels": list(expert_table.row_labels),
            "col_labels": list(expert_table.col_labels),
            "observed_expert": [list(r) for r in expert_table.cells],
            "observed_software": [list(r) for r in software_table.cells],
            "expected": [list(r) for r in expected],
        }

    if as_json:
        click.echo(json.dumps(report, ensure_ascii=False, indent=2))
        return
    _print_evaluation(report)


def _load_tables(path: Path) -> tuple[ContingencyTable, ContingencyTable]:
    raw = json.loads(path.read_text(encoding="utf-8"))
    rows = tuple(raw["row_labels"])
    cols = tuple(raw["col_labels"])
    expert = ContingencyTable(rows, cols, tuple(tuple(r) for r in raw["expert"]))
    software = ContingencyTable(rows, cols, tuple(tuple(r) for r in raw["software"]))
    return expert, software


def _tables_from_pairs(pairs, threshold: float):
    if any(p.age is None for p in pairs):
        return None
    rows = sorted({d for p in pairs for d, _ in p.expert}
                  | {d for p in pairs for d, ch in p.software if ch >= threshold})
    expert_cases = [(p.age, [d for d, _ in p.expert]) for p in pairs]
    software_cases = [
        (p.age, [d for d, ch in p.software if ch >= threshold]) for p in pairs
    ]
    expert = build_contingency(expert_cases, row_labels=rows)
    # The software may predict nothing anywhere; fall back to no tables then.
    if all(not diseases for _, diseases in software_cases):
        return None
    software = build_contingency(software_cases, row_labels=rows)
    return expert, software


def _print_evaluation(report: dict) -> None:
    sd = report["sd"]
    click.echo(
        f"deviation from mu={sd['mu']} over {sd['n']} datapoints: "
        f"paper-form {sd['paper']:.4f}, population-form {sd['population']:.4f}"
    )
    metrics = report["metrics"]
    click.echo(
        f"recall {metrics['recall'] * 100:.2f}%  "
        f"precision {metrics['precision'] * 100:.2f}%  "
        f"accuracy {metrics['accuracy'] * 100:.2f}%"
    )
    if report["chi_square"] is None:
        click.echo("no contingency tables (supply --tables or per-pair ages)")
        return
    chi = report["chi_square"]
    click.echo(f"chi-square {chi['statistic']:.4f} with df={chi['df']}")
    for verdict in chi["homogeneous_at"]:
        word = "homogeneous" if verdict["homogeneous"] else "NOT homogeneous"
        click.echo(f"  at critical {verdict['critical']}: {word}")
    tables = report["tables"]
    click.echo(_format_table("observed (expert)", tables["row_labels"],
                             tables["col_labels"], tables["observed_expert"]))
    click.echo(_format_table("observed (software)", tables["row_labels"],
                             tables["col_labels"], tables["observed_software"]))
    click.echo(_format_table("expected (from expert margins)", tables["row_labels"],
                             tables["col_labels"], tables["expected"], floats=True))


def _format_table(title: str, rows: list, cols: list, cells: list, floats: bool = False) -> str:
    width = max(12, max((len(r) for r in rows), default=0) + 2)
    def fmt(v) -> str:
        if floats:
            return f"{v:.2f}"
        return str(int(v)) if isinstance(v, float) else str(v)
    header = " " * width + "".join(f"{c:>10}" for c in cols) + f"{'total':>10}"
    lines = [title, header]
    col_totals = [0.0] * len(cols)
    for label, row in zip(rows, cells):
        for i, v in enumerate(row):
            col_totals[i] += v
        lines.append(
            f"{label:<{width}}" + "".join(f"{fmt(v):>10}" for v in row)
            + f"{fmt(sum(row)):>10}"
        )
    lines.append(
        f"{'total':<{width}}" + "".join(f"{fmt(v):>10}" for v in col_totals)
        + f"{fmt(sum(col_totals)):>10}"
    )
    return "\n".join(lines)


@main.command()
@click.option("--kb", "kb_path", required=True, type=click.Path(path_type=Path))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--store", "store_dir", type=click.Path(path_type=Path),
              help="Directory for the append-only case store.")
@click.option("--epsilon", default=DEFAULT_EPSILON, show_default=True)
def serve(kb_path: Path, port: int, host: str, store_dir: Path | None, epsilon: float) -> None:
    """Run the consultation HTTP service."""
    import uvicorn

    from .service import create_app

    try:
        knowledge = load_kb_file(kb_path)
    except (OSError, FramedxError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    app = create_app(knowledge, store_dir=store_dir, epsilon=epsilon)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
