"""Embedding-space geometry: class means, RMS dispersions and the separability ratio.

``R = ||mu_bf - mu_at|| / (sigma_bf + sigma_at)`` where each sigma is the RMS
Euclidean distance of a class's vectors to the class mean. Shift reports
compare an in-domain set (validation partition) with a shifted one (test
partition): SRD is the percent drop of R, DDP the percent drop of
``sigma_bf + sigma_at``.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import (
    DegenerateDispersion,
    DimensionMismatch,
    InvalidEnum,
    OneClassInput,
    ParseError,
    ValidationError,
    ZeroBaselineDispersion,
    ZeroBaselineRatio,
)

MAGIC = b"EMB1"
_U32 = struct.Struct("<I")


def json_number(x: float) -> float | str:
    """Finite floats pass through; infinities become the markers "inf" / "-inf"."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    ids: tuple[str, ...]
    is_attack: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        vec = np.array(self.vectors, dtype=np.float64)
        if vec.ndim != 2 or vec.shape[1] < 1:
            raise ValidationError("vectors must be a 2-D array with dim >= 1")
        lab = np.array(self.is_attack, dtype=bool).ravel()
        if not (len(self.ids) == lab.size == vec.shape[0]):
            raise ValidationError("ids, labels and vectors differ in length")
        if not np.isfinite(vec).all():
            raise ValidationError("embedding components must be finite")
        vec.flags.writeable = False
        lab.flags.writeable = False
        object.__setattr__(self, "vectors", vec)
        object.__setattr__(self, "is_attack", lab)
        object.__setattr__(self, "ids", tuple(self.ids))

    @classmethod
    def from_classes(cls, bonafide, attack, dim: int | None = None) -> "EmbeddingSet":
        bf = np.asarray(bonafide, dtype=np.float64).reshape(-1, dim or np.shape(bonafide)[-1])
        at = np.asarray(attack, dtype=np.float64).reshape(-1, bf.shape[1])
        ids = [f"bf-{i:06d}" for i in range(len(bf))] + [f"at-{i:06d}" for i in range(len(at))]
        labels = np.r_[np.zeros(len(bf), bool), np.ones(len(at), bool)]
        return cls(tuple(ids), labels, np.vstack([bf, at]))

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def bonafide(self) -> np.ndarray:
        return self.vectors[~self.is_attack]

    @property
    def attack(self) -> np.ndarray:
        return self.vectors[self.is_attack]


@dataclass(frozen=True)
class ClassGeometry:
    mu_bf: np.ndarray
    mu_at: np.ndarray
    sigma_bf: float
    sigma_at: float
    mean_gap: float
    ratio: float  # math.inf when dispersion vanishes but the means differ

    @property
    def dispersion(self) -> float:
        return self.sigma_bf + self.sigma_at

    def to_dict(self) -> dict:
        return {
            "mu_bf": self.mu_bf.tolist(),
            "mu_at": self.mu_at.tolist(),
            "sigma_bf": self.sigma_bf,
            "sigma_at": self.sigma_at,
            "mean_gap": self.mean_gap,
            "ratio": json_number(self.ratio),
        }


@dataclass(frozen=True)
class ShiftReport:
    r_in: float
    r_shift: float
    srd: float
    ddp: float
    dispersion_in: float
    dispersion_shift: float

    def to_dict(self) -> dict:
        return {k: json_number(v) for k, v in self.__dict__.items()}


def class_geometry(emb: EmbeddingSet) -> ClassGeometry:
    bf = np.ascontiguousarray(emb.bonafide)
    at = np.ascontiguousarray(emb.attack)
    if len(bf) == 0 or len(at) == 0:
        raise OneClassInput(f"need both classes, got {len(bf)} bona fide and {len(at)} attack")
    mu_bf, s_bf = _kernels.class_moments(bf)
    mu_at, s_at = _kernels.class_moments(at)
    gap = float(np.linalg.norm(mu_bf - mu_at))
    denom = float(s_bf) + float(s_at)
    if denom > 0:
        ratio = gap / denom
    elif gap > 0:
        ratio = math.inf
    else:
        raise DegenerateDispersion("zero dispersion and coincident class means")
    return ClassGeometry(mu_bf, mu_at, float(s_bf), float(s_at), gap, ratio)


def shift_report(in_domain: EmbeddingSet, shifted: EmbeddingSet) -> ShiftReport:
    """SRD and DDP (both in percent) from ``in_domain`` to ``shifted``.

    Positive SRD means separability degraded; positive DDP means the class
    clouds tightened.
    """
    if in_domain.dim != shifted.dim:
        raise DimensionMismatch(f"in-domain dim {in_domain.dim} != shifted dim {shifted.dim}")
    g_in = class_geometry(in_domain)
    g_sh = class_geometry(shifted)
    if g_in.dispersion == 0:
        raise ZeroBaselineDispersion("in-domain dispersion is zero")
    if g_in.ratio == 0:
        raise ZeroBaselineRatio("in-domain separability ratio is zero")
    srd = (g_in.ratio - g_sh.ratio) / g_in.ratio * 100.0
    ddp = (g_in.dispersion - g_sh.dispersion) / g_in.dispersion * 100.0
    return ShiftReport(g_in.ratio, g_sh.ratio, srd, ddp, g_in.dispersion, g_sh.dispersion)


# --------------------------------------------------------------------- I/O


def write_embeddings_binary(emb: EmbeddingSet, path: str | Path) -> None:
    """EMB1: magic, u32 dim, then per record u32 id length, id, u8 label, dim x f32 (LE)."""
    parts = [MAGIC, _U32.pack(emb.dim)]
    vec32 = emb.vectors.astype("<f4")
    for sid, attack, row in zip(emb.ids, emb.is_attack, vec32):
        raw = sid.encode("utf-8")
        parts += [_U32.pack(len(raw)), raw, bytes((int(attack),)), row.tobytes()]
    Path(path).write_bytes(b"".join(parts))


def read_embeddings_binary(path: str | Path) -> EmbeddingSet:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ParseError(f"{path}: missing EMB1 magic")
    if len(data) < 8:
        raise ParseError(f"{path}: truncated header")
    (dim,) = _U32.unpack_from(data, 4)
    if dim < 1:
        raise ParseError(f"{path}: dim must be positive")
    row_bytes = 4 * dim
    pos = 8
    ids, labels, rows = [], [], []
    try:
        while pos < len(data):
            (n,) = _U32.unpack_from(data, pos)
            pos += 4
            ids.append(data[pos : pos + n].decode("utf-8"))
            pos += n
            label = data[pos]
            if label > 1:
                raise ParseError(f"{path}: label byte {label} at offset {pos}")
            labels.append(bool(label))
            pos += 1
            if pos + row_bytes > len(data):
                raise ParseError(f"{path}: truncated record {len(ids)}")
            rows.append(np.frombuffer(data, "<f4", dim, pos))
            pos += row_bytes
    except (struct.error, IndexError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: malformed record {len(ids)} ({exc})") from exc
    vectors = np.vstack(rows).astype(np.float64) if rows else np.empty((0, dim))
    return EmbeddingSet(tuple(ids), np.array(labels, bool), vectors)


def write_embeddings_csv(emb: EmbeddingSet, path: str | Path) -> None:
    head = ["sample_id", "label"] + [f"d{k}" for k in range(emb.dim)]
    lines = [",".join(head)]
    for sid, attack, row in zip(emb.ids, emb.is_attack, emb.vectors):
        lines.append(",".join([sid, "attack" if attack else "bonafide"] + [repr(float(v)) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_embeddings_csv(path: str | Path) -> EmbeddingSet:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file")
    head = lines[0].split(",")
    dim = len(head) - 2
    if head[:2] != ["sample_id", "label"] or head[2:] != [f"d{k}" for k in range(dim)] or dim < 1:
        raise ParseError(f"{path}: bad header")
    ids, labels, rows = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != dim + 2:
            raise ParseError(f"{path}:{lineno}: expected {dim + 2} fields")
        if parts[1] not in ("bonafide", "attack"):
            raise InvalidEnum(f"{path}:{lineno}: unknown label {parts[1]!r}")
        try:
            rows.append([float(v) for v in parts[2:]])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        ids.append(parts[0])
        labels.append(parts[1] == "attack")
    vectors = np.array(rows, dtype=np.float64).reshape(-1, dim)
    return EmbeddingSet(tuple(ids), np.array(labels, bool), vectors)


def load_embeddings(path: str | Path) -> EmbeddingSet:
    """Dispatch on content: EMB1 magic means binary, anything else CSV."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    return read_embeddings_binary(path) if magic == MAGIC else read_embeddings_csv(path)


def save_embeddings(emb: EmbeddingSet, path: str | Path) -> None:
    if str(path).endswith(".csv"):
        write_embeddings_csv(emb, path)
    else:
        write_embeddings_binary(emb, path)


def subset(emb: EmbeddingSet, ids: Iterable[str]) -> EmbeddingSet:
    """Rows of ``emb`` whose id is in ``ids`` (e.g. a protocol partition)."""
    wanted = set(ids)
    mask = np.fromiter((s in wanted for s in emb.ids), bool, len(emb.ids))
    keep: Sequence[str] = tuple(s for s, m in zip(emb.ids, mask) if m)
    return EmbeddingSet(keep, emb.is_attack[mask], emb.vectors[mask])
