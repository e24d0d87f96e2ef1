"""Class-stratified percentile bootstrap for score-based metrics.

Replicate ``r`` is drawn from the stream keyed by
``rng.replicate_key(master_seed, r)``: bona fide draw ``j`` uses counter
``j`` and attack draw ``j`` uses counter ``n_bonafide + j``. Aggregates are
computed on the sorted replicate vector, so the result does not depend on how
replicates were scheduled across workers.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels, rng
from .metrics import DEFAULT_ALPHAS, ScoreSet, bpcer_name, pad_metrics


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int = 1000
    ci_level: float = 0.95
    master_seed: int = 0

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must lie in (0, 1)")


@dataclass(frozen=True)
class CiResult:
    metric: str
    point_estimate: float
    mean: float
    lo: float
    hi: float
    half_width: float

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "point": self.point_estimate,
            "mean": self.mean,
            "lo": self.lo,
            "hi": self.hi,
            "half_width": self.half_width,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CiResult":
        return cls(d["metric"], d["point"], d["mean"], d["lo"], d["hi"], d["half_width"])


def resample(scores: ScoreSet, key: int) -> ScoreSet:
    """Draw each class with replacement at its own size from the stream ``key``."""
    nb, na = scores.n_bonafide, scores.n_attack
    ib = rng.indices(key, 0, nb, nb)
    ia = rng.indices(key, nb, na, na)
    return ScoreSet(
        scores.bonafide[ib],
        scores.attack[ia],
        scores.direction,
        tuple(scores.bonafide_ids[i] for i in ib) if scores.bonafide_ids else None,
        tuple(scores.attack_ids[i] for i in ia) if scores.attack_ids else None,
    )


def summarize_replicates(
    name: str, point: float, values: np.ndarray, ci_level: float
) -> CiResult:
    v = np.sort(np.asarray(values, dtype=np.float64))
    tail = (1.0 - ci_level) / 2.0
    lo, hi = np.quantile(v, [tail, 1.0 - tail], method="linear")
    return CiResult(name, float(point), float(v.mean()), float(lo), float(hi), float((hi - lo) / 2.0))


def _chunks(n: int, workers: int) -> list[np.ndarray]:
    return [c for c in np.array_split(np.arange(n), max(1, workers)) if c.size]


def replicate_values(
    scores: ScoreSet,
    metric: Callable[[ScoreSet], float],
    cfg: BootstrapConfig,
    workers: int = 1,
) -> np.ndarray:
    """Metric value of every replicate, indexed by replicate number."""
    out = np.empty(cfg.replicates, dtype=np.float64)

    def run(idx):
        for r in idx:
            out[r] = metric(resample(scores, rng.replicate_key(cfg.master_seed, int(r))))

    _map(run, _chunks(cfg.replicates, workers), workers)
    return out


def bootstrap_ci(
    scores: ScoreSet,
    metric: Callable[[ScoreSet], float],
    cfg: BootstrapConfig = BootstrapConfig(),
    workers: int = 1,
    name: str | None = None,
) -> CiResult:
    """Percentile interval for any ``metric(ScoreSet) -> float``."""
    values = replicate_values(scores, metric, cfg, workers)
    label = name or getattr(metric, "__name__", "metric")
    return summarize_replicates(label, metric(scores), values, cfg.ci_level)


def _sorted_with_rank(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(x, kind="stable")
    rank = np.empty(x.size, dtype=np.int64)
    rank[order] = np.arange(x.size)
    return np.ascontiguousarray(x[order]), rank


def pad_replicate_matrix(
    scores: ScoreSet,
    cfg: BootstrapConfig,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    workers: int = 1,
) -> np.ndarray:
    """``(replicates, 1 + len(alphas))`` matrix of [d_eer, bpcer@alpha...].

    Same replicate streams as :func:`replicate_values`, computed by the fused
    kernel without materialising resampled ScoreSets.
    """
    sign = 1.0 if scores.direction == "attack_high" else -1.0
    bf, bf_rank = _sorted_with_rank(sign * scores.bonafide)
    at, at_rank = _sorted_with_rank(sign * scores.attack)
    keys = rng.replicate_keys(cfg.master_seed, cfg.replicates)
    alpha_arr = np.asarray(alphas, dtype=np.float64)
    out = np.empty((cfg.replicates, 1 + alpha_arr.size), dtype=np.float64)

    def run(idx):
        out[idx[0] : idx[-1] + 1] = _kernels.bootstrap_chunk(
            bf, bf_rank, at, at_rank, np.ascontiguousarray(keys[idx]), alpha_arr
        )

    _map(run, _chunks(cfg.replicates, workers), workers)
    return out


def bootstrap_pad_metrics(
    scores: ScoreSet,
    cfg: BootstrapConfig = BootstrapConfig(),
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    workers: int = 1,
) -> dict[str, CiResult]:
    """CIs for D-EER and every BPCER@APCER budget, sharing one resample per replicate."""
    point = pad_metrics(scores, alphas).as_dict()
    mat = pad_replicate_matrix(scores, cfg, alphas, workers)
    names = ["d_eer"] + [bpcer_name(a) for a in alphas]
    return {
        name: summarize_replicates(name, point[name], mat[:, k], cfg.ci_level)
        for k, name in enumerate(names)
    }


def _map(fn, chunks, workers: int) -> None:
    if workers <= 1 or len(chunks) == 1:
        for c in chunks:
            fn(c)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for fut in [pool.submit(fn, c) for c in chunks]:
            fut.result()
