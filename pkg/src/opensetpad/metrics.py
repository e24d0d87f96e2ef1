"""PAD operating-point metrics: APCER, BPCER, D-EER and BPCER at fixed APCER.

Scores default to the ``attack_high`` convention: a sample is called an
attack iff ``score >= threshold``. ``bonafide_high`` sets are negated
internally, so thresholds on :class:`OperatingPoint` are always expressed in
the attack-high orientation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import InvalidEnum, OneClassInput, ParseError, ValidationError

DIRECTIONS = ("attack_high", "bonafide_high")
SCORE_HEADER = ("sample_id", "label", "score")
DEFAULT_ALPHAS = (0.05, 0.10)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ScoreSet:
    """Labelled detection scores for one evaluation condition."""

    bonafide: np.ndarray
    attack: np.ndarray
    direction: str = "attack_high"
    bonafide_ids: tuple[str, ...] | None = None
    attack_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "bonafide", _frozen(self.bonafide).ravel())
        object.__setattr__(self, "attack", _frozen(self.attack).ravel())
        if self.direction not in DIRECTIONS:
            raise InvalidEnum(f"score direction must be one of {DIRECTIONS}")
        if self.bonafide.size == 0 or self.attack.size == 0:
            raise OneClassInput(
                f"need both classes, got {self.bonafide.size} bona fide and {self.attack.size} attack"
            )
        if not (np.isfinite(self.bonafide).all() and np.isfinite(self.attack).all()):
            raise ValidationError("scores must be finite")
        for ids, arr in ((self.bonafide_ids, self.bonafide), (self.attack_ids, self.attack)):
            if ids is not None and len(ids) != arr.size:
                raise ValueError("id list length differs from score count")

    @classmethod
    def from_entries(
        cls, entries: Iterable[tuple[str, str, float]], direction: str = "attack_high"
    ) -> "ScoreSet":
        bf_ids, bf, at_ids, at = [], [], [], []
        for sid, label, score in entries:
            if label == "bonafide":
                bf_ids.append(sid)
                bf.append(score)
            elif label == "attack":
                at_ids.append(sid)
                at.append(score)
            else:
                raise InvalidEnum(f"{sid}: unknown label {label!r}")
        return cls(bf, at, direction, tuple(bf_ids), tuple(at_ids))

    @property
    def n_bonafide(self) -> int:
        return int(self.bonafide.size)

    @property
    def n_attack(self) -> int:
        return int(self.attack.size)

    def entries(self) -> list[tuple[str, str, float]]:
        bf_ids = self.bonafide_ids or tuple(f"bf-{i:06d}" for i in range(self.n_bonafide))
        at_ids = self.attack_ids or tuple(f"at-{i:06d}" for i in range(self.n_attack))
        out = [(s, "bonafide", float(v)) for s, v in zip(bf_ids, self.bonafide)]
        out += [(s, "attack", float(v)) for s, v in zip(at_ids, self.attack)]
        return out

    @cached_property
    def sorted_oriented(self) -> tuple[np.ndarray, np.ndarray]:
        """Both classes sorted ascending in attack-high orientation."""
        sign = 1.0 if self.direction == "attack_high" else -1.0
        return np.sort(sign * self.bonafide), np.sort(sign * self.attack)


@dataclass(frozen=True)
class OperatingPoint:
    threshold: float
    apcer: float
    bpcer: float


@dataclass(frozen=True)
class MetricResult:
    d_eer: float
    bpcer_at: dict[float, float] = field(default_factory=dict)

    @property
    def bpcer_at_5(self) -> float:
        return self.bpcer_at[0.05]

    @property
    def bpcer_at_10(self) -> float:
        return self.bpcer_at[0.10]

    def as_dict(self) -> dict[str, float]:
        out = {"d_eer": self.d_eer}
        for alpha, v in self.bpcer_at.items():
            out[bpcer_name(alpha)] = v
        return out


def bpcer_name(alpha: float) -> str:
    return f"bpcer_at_{alpha * 100:g}"


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def operating_points(scores: ScoreSet) -> list[OperatingPoint]:
    """All distinct operating points, ordered by increasing threshold.

    Candidate thresholds are -inf, the midpoints between consecutive distinct
    scores, and +inf. Counts are taken by rank, so a midpoint that rounds onto
    one of its neighbours still separates them.
    """
    bf, at = scores.sorted_oriented
    values, accepted, rejected = _kernels.sweep(bf, at)
    distinct = values[1:]
    thresholds = np.empty(values.size)
    thresholds[0] = -np.inf
    thresholds[1:-1] = (distinct[:-1] + distinct[1:]) / 2.0
    thresholds[-1] = np.inf
    apcer = accepted / scores.n_attack
    bpcer = rejected / scores.n_bonafide
    return [
        OperatingPoint(float(t), float(a), float(b))
        for t, a, b in zip(thresholds, apcer, bpcer)
    ]


def pad_metrics(scores: ScoreSet, alphas: Sequence[float] = DEFAULT_ALPHAS) -> MetricResult:
    """D-EER and BPCER at each APCER budget from one threshold sweep."""
    for a in alphas:
        _check_alpha(a)
    bf, at = scores.sorted_oriented
    vals = _kernels.pad_metrics_sorted(bf, at, np.asarray(alphas, dtype=np.float64))
    return MetricResult(float(vals[0]), {float(a): float(v) for a, v in zip(alphas, vals[1:])})


def d_eer(scores: ScoreSet) -> float:
    """Equal-error rate on the piecewise-linear (APCER, BPCER) curve.

    Returns the exact value when some threshold has APCER == BPCER, otherwise
    interpolates linearly between the two points where APCER - BPCER
    changes sign.
    """
    return pad_metrics(scores, ()).d_eer


def bpcer_at_apcer(scores: ScoreSet, alpha: float) -> float:
    """Lowest BPCER among thresholds whose APCER does not exceed ``alpha``."""
    _check_alpha(alpha)
    return pad_metrics(scores, (alpha,)).bpcer_at[float(alpha)]


# --------------------------------------------------------------------- I/O


def parse_scores(text: str, direction: str = "attack_high", source: str = "<string>") -> ScoreSet:
    lines = [ln.rstrip("\r") for ln in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    if not lines or tuple(lines[0].split(",")) != SCORE_HEADER:
        raise ParseError(f"{source}: expected header {','.join(SCORE_HEADER)}")
    entries = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"{source}:{lineno}: expected 3 fields, got {len(parts)}")
        sid, label, raw = parts
        try:
            value = float(raw)
        except ValueError as exc:
            raise ParseError(f"{source}:{lineno}: bad score {raw!r}") from exc
        if not math.isfinite(value):
            raise ParseError(f"{source}:{lineno}: non-finite score {raw!r}")
        entries.append((sid, label, value))
    return ScoreSet.from_entries(entries, direction)


def load_scores(path: str | Path, direction: str = "attack_high") -> ScoreSet:
    path = Path(path)
    return parse_scores(path.read_text(encoding="utf-8"), direction, str(path))


def format_scores(scores: ScoreSet) -> str:
    rows = [",".join(SCORE_HEADER)]
    rows += [f"{sid},{label},{value!r}" for sid, label, value in scores.entries()]
    return "\n".join(rows) + "\n"


def write_scores(scores: ScoreSet, path: str | Path) -> None:
    Path(path).write_text(format_scores(scores), encoding="utf-8", newline="\n")
