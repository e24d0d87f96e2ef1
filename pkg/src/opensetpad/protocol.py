"""Open-set train/validation/test partitions.

Every generator takes validated manifest records and returns a
:class:`ProtocolRun`; the held-out unit (PAI, dataset, spectrum, or a
dataset x PAI pair) never reaches the training or validation pool.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import rng
from .corpus import JOINT_HOLDOUT_PAIRS
from .errors import (
    EmptyHoldout,
    InvalidEnum,
    MissingBonafide,
    MissingSpectrum,
    OneClassTrain,
    UnknownDataset,
)
from .manifest import LABELS, SampleRecord

log = logging.getLogger(__name__)

HELD_OUT_PAIS = ("synthetic", "textured_lens", "paper_print", "diseased")
UNSEEN_FACTORS = ("pai", "dataset", "spectrum", "dataset_and_pai", "spectrum_reverse")
MIN_PER_LABEL = 5


@dataclass(frozen=True)
class ProtocolRun:
    run_id: str
    unseen_factor: str
    train_ids: tuple[str, ...]
    val_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    degenerate: bool = False
    flags: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "unseen_factor": self.unseen_factor,
            "train": list(self.train_ids),
            "val": list(self.val_ids),
            "test": list(self.test_ids),
            "degenerate": self.degenerate,
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProtocolRun":
        return cls(
            run_id=d["run_id"],
            unseen_factor=d["unseen_factor"],
            train_ids=tuple(d["train"]),
            val_ids=tuple(d["val"]),
            test_ids=tuple(d["test"]),
            degenerate=bool(d.get("degenerate", False)),
            flags=tuple(d.get("flags", ())),
        )

    @property
    def file_stem(self) -> str:
        return self.run_id.replace("/", "_")


class TrainValSplit(NamedTuple):
    train: list[str]
    val: list[str]
    flags: list[str]


def val_count(n: int) -> int:
    """round(0.2 * n) with halves rounded up, in integer arithmetic."""
    return (2 * n + 5) // 10


def split_train_val(items: Iterable[tuple[str, str]], seed: int) -> TrainValSplit:
    """Class-stratified 80/20 split of ``(sample_id, label)`` pairs.

    Within each label the ids are sorted, permuted by the stable argsort of
    the words ``rng.word(derive(seed, TAG_SPLIT, label_index), position)``,
    and the first ``n - val_count(n)`` go to training. Labels with fewer than
    five samples go entirely to training and are flagged.
    """
    by_label: dict[str, list[str]] = {lab: [] for lab in LABELS}
    for sid, label in items:
        if label not in by_label:
            raise InvalidEnum(f"unknown label {label!r}")
        by_label[label].append(sid)
    train: list[str] = []
    val: list[str] = []
    flags: list[str] = []
    for li, label in enumerate(LABELS):
        ids = sorted(by_label[label])
        n = len(ids)
        if n == 0:
            continue
        if n < MIN_PER_LABEL:
            flags.append(f"{label}_lt{MIN_PER_LABEL}_train_only")
            train.extend(ids)
            continue
        keys = rng.words(rng.derive(seed, rng.TAG_SPLIT, li), 0, n)
        order = np.argsort(keys, kind="stable")
        shuffled = [ids[k] for k in order]
        cut = n - val_count(n)
        train.extend(shuffled[:cut])
        val.extend(shuffled[cut:])
    return TrainValSplit(sorted(train), sorted(val), flags)


def _nir(records: Sequence[SampleRecord]) -> list[SampleRecord]:
    return [r for r in records if r.spectrum == "NIR"]


def _labels_of(records: Iterable[SampleRecord]) -> set[str]:
    return {r.label for r in records}


def _build(
    run_id: str,
    factor: str,
    pool: Sequence[SampleRecord],
    test: Sequence[SampleRecord],
    seed: int,
) -> ProtocolRun:
    if _labels_of(pool) != set(LABELS):
        raise OneClassTrain(f"{run_id}: training pool lacks a class ({sorted(_labels_of(pool))})")
    split = split_train_val(((r.sample_id, r.label) for r in pool), seed)
    flags = list(split.flags)
    degenerate = _labels_of(test) != set(LABELS)
    if degenerate:
        flags.append("one_class_test")
        log.warning("%s: test set has a single class; metrics will reject it", run_id)
    run = ProtocolRun(
        run_id=run_id,
        unseen_factor=factor,
        train_ids=tuple(split.train),
        val_ids=tuple(split.val),
        test_ids=tuple(sorted(r.sample_id for r in test)),
        degenerate=degenerate,
        flags=tuple(flags),
    )
    check_disjoint(run)
    return run


def check_disjoint(run: ProtocolRun) -> None:
    train, val, test = set(run.train_ids), set(run.val_ids), set(run.test_ids)
    if not test:
        raise EmptyHoldout(f"{run.run_id}: empty test set")
    if train & val or train & test or val & test:
        raise AssertionError(f"{run.run_id}: partitions overlap")


def generate_p1(records: Sequence[SampleRecord], held_pai: str, seed: int = 0) -> ProtocolRun:
    """Hold out one PAI plus bona fide samples of every dataset that contributes it."""
    if held_pai not in HELD_OUT_PAIS:
        raise InvalidEnum(f"held_pai must be one of {HELD_OUT_PAIS}, got {held_pai!r}")
    nir = _nir(records)
    attacks = [r for r in nir if r.pai_category == held_pai]
    if not attacks:
        raise EmptyHoldout(f"no NIR samples of PAI {held_pai!r}")
    sources = {r.dataset for r in attacks}
    bonafide = [r for r in nir if r.label == "bonafide" and r.dataset in sources]
    if not bonafide:
        raise MissingBonafide(f"no bona fide samples in {sorted(sources)} to pair with {held_pai!r}")
    test = attacks + bonafide
    test_ids = {r.sample_id for r in test}
    pool = [r for r in nir if r.sample_id not in test_ids]
    return _build(f"P1/{held_pai}", "pai", pool, test, seed)


def generate_p2(records: Sequence[SampleRecord], held_dataset: str, seed: int = 0) -> ProtocolRun:
    """Leave one NIR dataset out entirely."""
    nir = _nir(records)
    test = [r for r in nir if r.dataset == held_dataset]
    if not test:
        raise UnknownDataset(f"dataset {held_dataset!r} not among NIR records")
    pool = [r for r in nir if r.dataset != held_dataset]
    return _build(f"P2/{held_dataset}", "dataset", pool, test, seed)


def _spectral(records, source: str, target: str, run_id: str, factor: str, seed: int):
    pool = [r for r in records if r.spectrum == source]
    test = [r for r in records if r.spectrum == target]
    missing = [s for s, part in ((source, pool), (target, test)) if not part]
    if missing:
        raise MissingSpectrum(f"{run_id}: no {' or '.join(missing)} records")
    return _build(run_id, factor, pool, test, seed)


def generate_p3(records: Sequence[SampleRecord], seed: int = 0) -> ProtocolRun:
    """Train on all NIR, test on all VIS."""
    vis_sets = sorted({r.dataset for r in records if r.spectrum == "VIS"})
    name = "+".join(vis_sets) if vis_sets else "VIS"
    return _spectral(records, "NIR", "VIS", f"P3/{name}", "spectrum", seed)


def generate_reverse_spectral(records: Sequence[SampleRecord], seed: int = 0) -> ProtocolRun:
    return _spectral(records, "VIS", "NIR", "PR/VIS_to_NIR", "spectrum_reverse", seed)


def generate_p4(
    records: Sequence[SampleRecord], held_dataset: str, held_pai: str, seed: int = 0
) -> ProtocolRun:
    """Hold out a dataset and a PAI at once.

    Test: bona fide of the held dataset plus its attacks of the held PAI.
    Train/val: NIR data outside the held dataset with any other PAI.
    """
    if held_pai not in HELD_OUT_PAIS:
        raise InvalidEnum(f"held_pai must be one of {HELD_OUT_PAIS}, got {held_pai!r}")
    nir = _nir(records)
    if not any(r.dataset == held_dataset for r in nir):
        raise UnknownDataset(f"dataset {held_dataset!r} not among NIR records")
    attacks = [r for r in nir if r.dataset == held_dataset and r.pai_category == held_pai]
    if not attacks:
        raise EmptyHoldout(f"{held_dataset!r} has no {held_pai!r} attacks")
    bonafide = [r for r in nir if r.dataset == held_dataset and r.label == "bonafide"]
    pool = [r for r in nir if r.dataset != held_dataset and r.pai_category != held_pai]
    return _build(f"P4/{held_dataset}+{held_pai}", "dataset_and_pai", pool, attacks + bonafide, seed)


def enumerate_p1(records: Sequence[SampleRecord], seed: int = 0) -> list[ProtocolRun]:
    present = {r.pai_category for r in _nir(records)}
    return [generate_p1(records, p, seed) for p in HELD_OUT_PAIS if p in present]


def enumerate_p2(records: Sequence[SampleRecord], seed: int = 0) -> list[ProtocolRun]:
    """One run per NIR dataset that holds both bona fide and attack samples.

    Attack-only sources (e.g. a pathology collection with no bona fide
    counterpart) stay in every training pool instead of forming a one-class
    test set; they can still be requested explicitly via :func:`generate_p2`.
    """
    labels: dict[str, set[str]] = {}
    for r in _nir(records):
        labels.setdefault(r.dataset, set()).add(r.label)
    runs = []
    for ds in sorted(labels):
        if labels[ds] != set(LABELS):
            log.info("P2: skipping single-class dataset %s", ds)
            continue
        runs.append(generate_p2(records, ds, seed))
    return runs


def enumerate_p4(records: Sequence[SampleRecord], seed: int = 0, pairs=JOINT_HOLDOUT_PAIRS):
    return [generate_p4(records, ds, pai, seed) for ds, pai in pairs]


def protocol_runs(
    records: Sequence[SampleRecord],
    protocol: str,
    *,
    held_dataset: str | None = None,
    held_pai: str | None = None,
    seed: int = 0,
) -> list[ProtocolRun]:
    """Runs for ``protocol`` in {"1", "2", "3", "4", "reverse"}.

    Omitting the held-out unit enumerates the whole protocol family.
    """
    if protocol == "1":
        return [generate_p1(records, held_pai, seed)] if held_pai else enumerate_p1(records, seed)
    if protocol == "2":
        if held_dataset:
            return [generate_p2(records, held_dataset, seed)]
        return enumerate_p2(records, seed)
    if protocol == "3":
        return [generate_p3(records, seed)]
    if protocol == "4":
        if held_dataset and held_pai:
            return [generate_p4(records, held_dataset, held_pai, seed)]
        if held_dataset or held_pai:
            raise ValueError("protocol 4 needs both --held-dataset and --held-pai, or neither")
        return enumerate_p4(records, seed)
    if protocol == "reverse":
        return [generate_reverse_spectral(records, seed)]
    raise ValueError(f"unknown protocol {protocol!r}")


def write_runs(runs: Sequence[ProtocolRun], out_dir: str | Path) -> list[Path]:
    """Write ``runs.json`` plus one ``<run>.json`` per run; return the per-run paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = [r.to_dict() for r in runs]
    (out / "runs.json").write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
    paths = []
    for run, d in zip(runs, payload):
        p = out / f"{run.file_stem}.json"
        p.write_text(json.dumps(d, indent=1) + "\n", encoding="utf-8")
        paths.append(p)
    return paths


def read_runs(path: str | Path) -> list[ProtocolRun]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = [data]
    return [ProtocolRun.from_dict(d) for d in data]
