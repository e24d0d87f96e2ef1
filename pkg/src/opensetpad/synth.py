"""Gaussian score and embedding generators with analytically known metrics.

All draws come from :mod:`opensetpad.rng` streams keyed by
``derive(seed, TAG, class_index)`` (bona fide 0, attack 1), so a spec and
seed fully determine the output.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import rng
from .metrics import ScoreSet
from .separability import EmbeddingSet


def std_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class GaussianScoreSpec:
    mu_bf: float
    sigma_bf: float
    mu_at: float
    sigma_at: float
    n_bf: int
    n_at: int
    seed: int = 0

    def __post_init__(self):
        if self.sigma_bf <= 0 or self.sigma_at <= 0:
            raise ValueError("sigmas must be positive")
        if self.n_bf < 1 or self.n_at < 1:
            raise ValueError("class sizes must be positive")

    def analytic_eer(self) -> float:
        """EER of the population; closed form needs equal sigmas."""
        if self.sigma_bf != self.sigma_at:
            raise ValueError("closed-form EER requires sigma_bf == sigma_at")
        return std_normal_cdf(-abs(self.mu_at - self.mu_bf) / (2.0 * self.sigma_bf))

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianScoreSpec":
        return cls(**d)


@dataclass(frozen=True)
class GaussianEmbeddingSpec:
    dim: int
    mean_bf: tuple[float, ...]
    mean_at: tuple[float, ...]
    scale_bf: float
    scale_at: float
    n_bf: int
    n_at: int
    seed: int = 0

    def __post_init__(self):
        for name in ("mean_bf", "mean_at"):
            v = getattr(self, name)
            if np.ndim(v) == 0:
                v = (float(v),) * self.dim
            v = tuple(float(x) for x in v)
            if len(v) != self.dim:
                raise ValueError(f"{name} has length {len(v)}, expected {self.dim}")
            object.__setattr__(self, name, v)
        if self.dim < 1 or self.n_bf < 1 or self.n_at < 1:
            raise ValueError("dim and class sizes must be positive")
        if self.scale_bf < 0 or self.scale_at < 0:
            raise ValueError("scales must be non-negative")

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianEmbeddingSpec":
        return cls(**d)


def gen_scores(spec: GaussianScoreSpec) -> ScoreSet:
    bf = spec.mu_bf + spec.sigma_bf * rng.normals(rng.derive(spec.seed, rng.TAG_SCORES, 0), 0, spec.n_bf)
    at = spec.mu_at + spec.sigma_at * rng.normals(rng.derive(spec.seed, rng.TAG_SCORES, 1), 0, spec.n_at)
    ids_bf = tuple(f"bf-{i:06d}" for i in range(spec.n_bf))
    ids_at = tuple(f"at-{i:06d}" for i in range(spec.n_at))
    return ScoreSet(bf, at, "attack_high", ids_bf, ids_at)


def _cloud(spec: GaussianEmbeddingSpec, label: int, n: int, mean, scale) -> np.ndarray:
    z = rng.normals(rng.derive(spec.seed, rng.TAG_EMBED, label), 0, n * spec.dim)
    return np.asarray(mean) + scale * z.reshape(n, spec.dim)


def gen_embeddings(spec: GaussianEmbeddingSpec) -> EmbeddingSet:
    """Isotropic clouds; expected RMS dispersion of a class is scale * sqrt(dim)."""
    bf = _cloud(spec, 0, spec.n_bf, spec.mean_bf, spec.scale_bf)
    at = _cloud(spec, 1, spec.n_at, spec.mean_at, spec.scale_at)
    return EmbeddingSet.from_classes(bf, at)


def load_spec(path: str | Path):
    """Read a spec JSON; embedding specs are recognised by their ``dim`` key."""
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    return GaussianEmbeddingSpec.from_dict(d) if "dim" in d else GaussianScoreSpec.from_dict(d)


def spec_to_json(spec) -> str:
    return json.dumps(asdict(spec), indent=1) + "\n"
