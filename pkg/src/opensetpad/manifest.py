"""Dataset manifests: one row per sample with provenance, label and PAI category."""
from __future__ import annotations

import io
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DuplicateId, InvalidEnum, ParseError, TaxonomyViolation

log = logging.getLogger(__name__)

HEADER = ("sample_id", "dataset", "sensor", "spectrum", "label", "pai_category")

SPECTRA = ("NIR", "VIS")
LABELS = ("bonafide", "attack")
PAI_CATEGORIES = (
    "none",
    "textured_lens",
    "paper_print",
    "diseased",
    "synthetic",
    "display",
    "print_display",
)
VIS_DATASET = "VSIA"


@dataclass(frozen=True)
class SampleRecord:
    sample_id: str
    dataset: str
    sensor: str
    spectrum: str
    label: str
    pai_category: str

    @property
    def is_attack(self) -> bool:
        return self.label == "attack"


@dataclass(frozen=True)
class ManifestSummary:
    """Sample counts per (dataset, label, pai_category) cell.

    ``by_category`` holds the taxonomy subtotals (``none`` is the bona fide
    subtotal) and ``by_label`` the bona fide / attack totals.
    """

    cells: dict[tuple[str, str, str], int]
    by_category: dict[str, int]
    by_label: dict[str, int]
    total: int
    by_spectrum: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "cells": [
                {"dataset": d, "label": lab, "pai_category": p, "count": n}
                for (d, lab, p), n in sorted(self.cells.items())
            ],
            "by_category": dict(sorted(self.by_category.items())),
            "by_label": dict(sorted(self.by_label.items())),
            "by_spectrum": dict(sorted(self.by_spectrum.items())),
            "total": self.total,
        }


def validate_record(rec: SampleRecord, vsia_strict: bool = False) -> None:
    if rec.spectrum not in SPECTRA:
        raise InvalidEnum(f"{rec.sample_id}: unknown spectrum {rec.spectrum!r}")
    if rec.label not in LABELS:
        raise InvalidEnum(f"{rec.sample_id}: unknown label {rec.label!r}")
    if rec.pai_category not in PAI_CATEGORIES:
        raise InvalidEnum(f"{rec.sample_id}: unknown pai_category {rec.pai_category!r}")
    if (rec.label == "bonafide") != (rec.pai_category == "none"):
        raise TaxonomyViolation(
            f"{rec.sample_id}: label {rec.label} with pai_category {rec.pai_category}"
        )
    if vsia_strict and (rec.spectrum == "VIS") != (rec.dataset == VIS_DATASET):
        raise TaxonomyViolation(
            f"{rec.sample_id}: spectrum {rec.spectrum} for dataset {rec.dataset} "
            f"(vsia-strict: VIS only for {VIS_DATASET})"
        )


def validate_records(
    records: Iterable[SampleRecord], *, vsia_strict: bool = False, dedupe: bool = False
) -> list[SampleRecord]:
    """Check every record; return the list, optionally dropping repeated ids."""
    seen: set[str] = set()
    out: list[SampleRecord] = []
    dropped = 0
    for rec in records:
        validate_record(rec, vsia_strict)
        if rec.sample_id in seen:
            if not dedupe:
                raise DuplicateId(f"duplicate sample_id {rec.sample_id!r}")
            dropped += 1
            continue
        seen.add(rec.sample_id)
        out.append(rec)
    if dropped:
        log.warning("dropped %d duplicate sample ids (kept first occurrence)", dropped)
    return out


def parse_manifest(
    text: str, *, vsia_strict: bool = False, dedupe: bool = False, source: str = "<string>"
) -> list[SampleRecord]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(f"{source}: missing header")
    header = tuple(lines[0].rstrip("\r").split(","))
    if header != HEADER:
        raise ParseError(f"{source}: bad header {lines[0]!r}, expected {','.join(HEADER)}")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.rstrip("\r")
        fields = line.split(",")
        if len(fields) != len(HEADER):
            raise ParseError(
                f"{source}:{lineno}: expected {len(HEADER)} fields, got {len(fields)}"
            )
        if not fields[0]:
            raise ParseError(f"{source}:{lineno}: empty sample_id")
        records.append(SampleRecord(*fields))
    return validate_records(records, vsia_strict=vsia_strict, dedupe=dedupe)


def load_manifest(
    path: str | Path, *, vsia_strict: bool = False, dedupe: bool = False
) -> list[SampleRecord]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 ({exc})") from exc
    return parse_manifest(text, vsia_strict=vsia_strict, dedupe=dedupe, source=str(path))


def format_manifest(records: Sequence[SampleRecord]) -> str:
    buf = io.StringIO()
    buf.write(",".join(HEADER) + "\n")
    for rec in records:
        fields = (rec.sample_id, rec.dataset, rec.sensor, rec.spectrum, rec.label, rec.pai_category)
        for f in fields:
            if "," in f or "\n" in f:
                raise ValueError(f"field {f!r} of {rec.sample_id!r} contains a delimiter")
        buf.write(",".join(fields) + "\n")
    return buf.getvalue()


def write_manifest(records: Sequence[SampleRecord], path: str | Path) -> None:
    Path(path).write_text(format_manifest(records), encoding="utf-8", newline="\n")


def summarize(records: Iterable[SampleRecord]) -> ManifestSummary:
    cells: Counter = Counter()
    spectra: Counter = Counter()
    for rec in records:
        cells[(rec.dataset, rec.label, rec.pai_category)] += 1
        spectra[rec.spectrum] += 1
    by_category: Counter = Counter()
    by_label: Counter = Counter()
    for (_, label, pai), n in cells.items():
        by_category[pai] += n
        by_label[label] += n
    return ManifestSummary(
        cells=dict(cells),
        by_category=dict(by_category),
        by_label=dict(by_label),
        total=sum(cells.values()),
        by_spectrum=dict(spectra),
    )


def summary_markdown(summary: ManifestSummary) -> str:
    rows = ["| dataset | label | pai_category | count |", "|---|---|---|---:|"]
    for (d, lab, p), n in sorted(summary.cells.items(), key=lambda kv: (kv[0][2], kv[0][0])):
        rows.append(f"| {d} | {lab} | {p} | {n} |")
    for pai, n in sorted(summary.by_category.items()):
        rows.append(f"| **subtotal** | | {pai} | {n} |")
    rows.append(f"| **total** | | | {summary.total} |")
    return "\n".join(rows) + "\n"
