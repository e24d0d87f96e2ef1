"""Result tables in ``mean±half_width`` style, as CSV or Markdown.

Cell values are stored as fractions and multiplied by 100 only when rendered.
Which cell is best is decided by metric metadata: lower wins for error rates
and SRD, higher wins for DDP.
"""
from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

RowKey = tuple[str, str, str]  # (model, variant, metric)


@dataclass(frozen=True)
class MetricInfo:
    label: str
    lower_is_better: bool


METRIC_INFO = {
    "d_eer": MetricInfo("D-EER (%)", True),
    "srd": MetricInfo("SRD", True),
    "ddp": MetricInfo("DDP", False),
}
_BPCER = re.compile(r"^bpcer_at_(\d+(?:\.\d+)?)$")


def metric_info(name: str) -> MetricInfo:
    if name in METRIC_INFO:
        return METRIC_INFO[name]
    m = _BPCER.match(name)
    if m:
        return MetricInfo(f"BPCER{m.group(1)} (%)", True)
    raise KeyError(f"no direction metadata for metric {name!r}")


@dataclass(frozen=True)
class ReportCell:
    mean: float
    half_width: float | None = None
    best: bool = False


@dataclass
class ReportTable:
    rows: list[RowKey] = field(default_factory=list)
    columns: list[str] = field(default_factory=list)
    cells: dict[tuple[RowKey, str], ReportCell] = field(default_factory=dict)

    def put(self, row: RowKey, column: str, cell: ReportCell) -> None:
        if row not in self.rows:
            self.rows.append(row)
        if column not in self.columns:
            self.columns.append(column)
        self.cells[(row, column)] = cell


def format_cell(mean: float, half_width: float | None = None) -> str:
    """Two-decimal ``MM.MM±HH.HH`` in display units; bare ``MM.MM`` without a width."""

    def fmt(x: float) -> str:
        s = f"{x:.2f}"
        return "0.00" if s == "-0.00" else s

    if half_width is None:
        return fmt(mean)
    return f"{fmt(mean)}±{fmt(half_width)}"


def parse_cell(text: str) -> tuple[float, float | None]:
    text = text.strip().strip("*")
    if "±" in text:
        m, h = text.split("±")
        return float(m), float(h)
    return float(text), None


def mark_best(table: ReportTable) -> ReportTable:
    """Flag one best cell per (metric, column); earlier rows win ties."""
    cells = {k: replace(c, best=False) for k, c in table.cells.items()}
    for metric in dict.fromkeys(r[2] for r in table.rows):
        lower = metric_info(metric).lower_is_better
        for col in table.columns:
            best_key = None
            for row in table.rows:
                c = cells.get((row, col))
                if row[2] != metric or c is None:
                    continue
                if best_key is None:
                    best_key = (row, col)
                    continue
                incumbent = cells[best_key].mean
                if (c.mean < incumbent) if lower else (c.mean > incumbent):
                    best_key = (row, col)
            if best_key is not None:
                cells[best_key] = replace(cells[best_key], best=True)
    return ReportTable(list(table.rows), list(table.columns), cells)


def _render(cell: ReportCell | None) -> str:
    if cell is None:
        return "-"
    hw = None if cell.half_width is None else cell.half_width * 100.0
    return format_cell(cell.mean * 100.0, hw)


def emit_table(table: ReportTable, fmt: str = "markdown") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "variant", "metric"] + table.columns)
        for row in table.rows:
            w.writerow(list(row) + [_render(table.cells.get((row, c))) for c in table.columns])
        return buf.getvalue()
    if fmt in ("md", "markdown"):
        lines = [
            "| Model | Variant | Metric | " + " | ".join(table.columns) + " |",
            "|---|---|---|" + "---:|" * len(table.columns),
        ]
        for row in table.rows:
            model, variant, metric = row
            rendered = []
            for c in table.columns:
                cell = table.cells.get((row, c))
                text = _render(cell)
                rendered.append(f"**{text}**" if cell is not None and cell.best else text)
            lines.append(
                f"| {model} | {variant} | {metric_info(metric).label} | " + " | ".join(rendered) + " |"
            )
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")


def parse_csv_table(text: str) -> dict[tuple[RowKey, str], tuple[float, float | None]]:
    """Numeric contents of an emitted CSV, in display units."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    columns = header[3:]
    out = {}
    for rec in reader:
        row = (rec[0], rec[1], rec[2])
        for col, raw in zip(columns, rec[3:]):
            if raw != "-":
                out[(row, col)] = parse_cell(raw)
    return out


# ------------------------------------------------------------ results → table


def result_payload(
    condition: str,
    model: str,
    variant: str,
    metrics: dict | None = None,
    separability: dict | None = None,
) -> dict:
    """Per-run result document consumed by :func:`table_from_results`.

    ``metrics`` maps a metric name to a CI dict (``point``, ``mean``,
    ``half_width``...) or a bare fraction; ``separability`` carries ``srd``
    and ``ddp`` in percent.
    """
    out: dict = {"condition": condition, "model": model, "variant": variant}
    if metrics:
        out["metrics"] = metrics
    if separability:
        out["separability"] = separability
    return out


def table_from_results(results: Sequence[dict], center: str = "mean") -> ReportTable:
    if center not in ("mean", "point"):
        raise ValueError("center must be 'mean' or 'point'")
    table = ReportTable()
    for res in results:
        model, variant, col = res["model"], res["variant"], res["condition"]
        for name, val in res.get("metrics", {}).items():
            if isinstance(val, dict):
                cell = ReportCell(float(val[center]), float(val["half_width"]))
            else:
                cell = ReportCell(float(val))
            table.put((model, variant, name), col, cell)
        sep = res.get("separability", {})
        for name in ("srd", "ddp"):
            if name in sep and not isinstance(sep[name], str):
                table.put((model, variant, name), col, ReportCell(float(sep[name]) / 100.0))
    return mark_best(table)


def load_results(results_dir: str | Path) -> list[dict]:
    """All ``*.json`` result documents in a directory, in file-name order."""
    out = []
    for p in sorted(Path(results_dir).glob("*.json")):
        doc = json.loads(p.read_text(encoding="utf-8"))
        if isinstance(doc, dict) and "condition" in doc:
            out.append(doc)
    return out
