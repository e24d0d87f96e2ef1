"""Hot numeric kernels, each in a numba and a pure-numpy flavour.

The public names at the bottom route through :func:`_backend.dispatch`.
Integer-valued outputs (RNG words, resample indices, error counts) are
bit-identical between flavours; the numba and numpy operating-point
reductions also evaluate the same float expressions in the same order.
"""
from __future__ import annotations

import numpy as np

from ._backend import dispatch, njit

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
TWO_M53 = 1.0 / 9007199254740992.0  # 2**-53
TWO_PI = 6.283185307179586
ALPHA_SLACK = 1e-9


# ---------------------------------------------------------------- RNG (numba)


@njit
def _mix64_nb(z):
    z = (z ^ (z >> S30)) * MIX1
    z = (z ^ (z >> S27)) * MIX2
    return z ^ (z >> S31)


@njit
def _draw_nb(key, counter):
    return _mix64_nb(np.uint64(key) + np.uint64(counter + 1) * GAMMA)


@njit
def _words_nb(key, start, n):
    out = np.empty(n, dtype=np.uint64)
    for i in range(n):
        out[i] = _draw_nb(key, start + i)
    return out


@njit
def _index_nb(word, bound):
    u = np.float64(word >> S11) * TWO_M53
    k = np.int64(u * bound)
    if k >= bound:
        k = bound - 1
    return k


@njit
def _indices_nb(key, start, n, bound):
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = _index_nb(_draw_nb(key, start + i), bound)
    return out


@njit
def _normals_nb(key, start, n):
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        w1 = _draw_nb(key, start + 2 * i)
        w2 = _draw_nb(key, start + 2 * i + 1)
        u1 = (np.float64(w1 >> S11) + 1.0) * TWO_M53
        u2 = np.float64(w2 >> S11) * TWO_M53
        out[i] = np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)
    return out


# ---------------------------------------------------------------- RNG (numpy)


def _words_np(key, start, n):
    ctr = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    z = np.uint64(key) + ctr * GAMMA
    z = (z ^ (z >> S30)) * MIX1
    z = (z ^ (z >> S27)) * MIX2
    return z ^ (z >> S31)


def _indices_np(key, start, n, bound):
    u = (_words_np(key, start, n) >> S11).astype(np.float64) * TWO_M53
    return np.minimum((u * bound).astype(np.int64), bound - 1)


def _normals_np(key, start, n):
    w = _words_np(key, start, 2 * n)
    u1 = ((w[0::2] >> S11).astype(np.float64) + 1.0) * TWO_M53
    u2 = (w[1::2] >> S11).astype(np.float64) * TWO_M53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)


# ------------------------------------------------------- operating-point sweep
#
# Both inputs sorted ascending, attack_high orientation. Point 0 is the
# below-min sentinel where every sample is called an attack; point k >= 1 sits
# just above the k-th distinct score value. ``accepted`` counts attacks below
# the threshold, ``rejected`` counts bona fide at or above it.


@njit
def _sweep_nb(bf, at):
    n_bf = bf.shape[0]
    n_at = at.shape[0]
    cap = n_bf + n_at + 1
    accepted = np.empty(cap, dtype=np.int64)
    rejected = np.empty(cap, dtype=np.int64)
    values = np.empty(cap, dtype=np.float64)
    accepted[0] = 0
    rejected[0] = n_bf
    values[0] = -np.inf
    i = 0
    j = 0
    ca = 0
    rb = n_bf
    m = 1
    while i < n_bf or j < n_at:
        if j >= n_at or (i < n_bf and bf[i] <= at[j]):
            v = bf[i]
        else:
            v = at[j]
        while i < n_bf and bf[i] == v:
            i += 1
            rb -= 1
        while j < n_at and at[j] == v:
            j += 1
            ca += 1
        accepted[m] = ca
        rejected[m] = rb
        values[m] = v
        m += 1
    return values[:m], accepted[:m], rejected[:m]


def _sweep_np(bf, at):
    values = np.unique(np.concatenate((bf, at)))
    accepted = np.searchsorted(at, values, side="right").astype(np.int64)
    rejected = bf.shape[0] - np.searchsorted(bf, values, side="right").astype(np.int64)
    return (
        np.concatenate(([-np.inf], values)),
        np.concatenate(([0], accepted)),
        np.concatenate(([bf.shape[0]], rejected)),
    )


@njit
def _eer_from_counts_nb(accepted, rejected, n_bf, n_at):
    for k in range(accepted.shape[0]):
        lhs = accepted[k] * n_bf
        rhs = rejected[k] * n_at
        if lhs >= rhs:
            a = accepted[k] / n_at
            if lhs == rhs:
                return a
            b = rejected[k] / n_bf
            a0 = accepted[k - 1] / n_at
            b0 = rejected[k - 1] / n_bf
            t = (b0 - a0) / ((a - a0) - (b - b0))
            return a0 + t * (a - a0)
    return np.nan


def _eer_from_counts_np(accepted, rejected, n_bf, n_at):
    crossed = accepted * n_bf >= rejected * n_at
    k = int(np.argmax(crossed))
    a = accepted[k] / n_at
    if accepted[k] * n_bf == rejected[k] * n_at:
        return float(a)
    b = rejected[k] / n_bf
    a0 = accepted[k - 1] / n_at
    b0 = rejected[k - 1] / n_bf
    t = (b0 - a0) / ((a - a0) - (b - b0))
    return float(a0 + t * (a - a0))


@njit
def _pad_metrics_nb(bf, at, alphas):
    n_bf = bf.shape[0]
    n_at = at.shape[0]
    _, accepted, rejected = _sweep_nb(bf, at)
    out = np.empty(1 + alphas.shape[0], dtype=np.float64)
    out[0] = _eer_from_counts_nb(accepted, rejected, n_bf, n_at)
    for q in range(alphas.shape[0]):
        budget = np.floor(alphas[q] * n_at + ALPHA_SLACK)
        best = n_bf
        for k in range(accepted.shape[0]):
            if accepted[k] > budget:
                break
            best = rejected[k]
        out[1 + q] = best / n_bf
    return out


def _pad_metrics_np(bf, at, alphas):
    n_bf = bf.shape[0]
    n_at = at.shape[0]
    _, accepted, rejected = _sweep_np(bf, at)
    out = np.empty(1 + len(alphas), dtype=np.float64)
    out[0] = _eer_from_counts_np(accepted, rejected, n_bf, n_at)
    for q, alpha in enumerate(alphas):
        budget = np.floor(alpha * n_at + ALPHA_SLACK)
        last = np.searchsorted(accepted, budget, side="right") - 1
        out[1 + q] = rejected[last] / n_bf
    return out


# ------------------------------------------------------- bootstrap replicates
#
# Pools are passed sorted together with ``rank`` (rank[i] = sorted position of
# original element i), so a resample's sorted multiset is rebuilt from counts
# without sorting. Bona fide draws use counters 0..n_bf-1, attacks
# n_bf..n_bf+n_at-1, both under the replicate key.


@njit
def _resorted_nb(pool, rank, key, start):
    n = pool.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    for d in range(n):
        counts[rank[_index_nb(_draw_nb(key, start + d), n)]] += 1
    out = np.empty(n, dtype=np.float64)
    p = 0
    for s in range(n):
        for _ in range(counts[s]):
            out[p] = pool[s]
            p += 1
    return out


@njit
def _bootstrap_chunk_nb(bf, bf_rank, at, at_rank, keys, alphas):
    n_bf = bf.shape[0]
    out = np.empty((keys.shape[0], 1 + alphas.shape[0]), dtype=np.float64)
    for r in range(keys.shape[0]):
        rbf = _resorted_nb(bf, bf_rank, keys[r], 0)
        rat = _resorted_nb(at, at_rank, keys[r], n_bf)
        out[r, :] = _pad_metrics_nb(rbf, rat, alphas)
    return out


def _resorted_np(pool, rank, key, start):
    n = pool.shape[0]
    counts = np.bincount(rank[_indices_np(key, start, n, n)], minlength=n)
    return np.repeat(pool, counts)


def _bootstrap_chunk_np(bf, bf_rank, at, at_rank, keys, alphas):
    n_bf = bf.shape[0]
    out = np.empty((keys.shape[0], 1 + len(alphas)), dtype=np.float64)
    for r, key in enumerate(keys):
        rbf = _resorted_np(bf, bf_rank, key, 0)
        rat = _resorted_np(at, at_rank, key, n_bf)
        out[r, :] = _pad_metrics_np(rbf, rat, alphas)
    return out


# ------------------------------------------------------------- class moments


@njit
def _class_moments_nb(x):
    n, dim = x.shape
    mu = np.zeros(dim, dtype=np.float64)
    for i in range(n):
        for d in range(dim):
            mu[d] += x[i, d]
    for d in range(dim):
        mu[d] /= n
    ss = 0.0
    for i in range(n):
        for d in range(dim):
            diff = x[i, d] - mu[d]
            ss += diff * diff
    return mu, np.sqrt(ss / n)


def _class_moments_np(x):
    mu = x.mean(axis=0)
    return mu, float(np.sqrt(np.mean(np.sum((x - mu) ** 2, axis=1))))


words = dispatch(_words_nb, _words_np)
indices = dispatch(_indices_nb, _indices_np)
normals = dispatch(_normals_nb, _normals_np)
sweep = dispatch(_sweep_nb, _sweep_np)
pad_metrics_sorted = dispatch(_pad_metrics_nb, _pad_metrics_np)
bootstrap_chunk = dispatch(_bootstrap_chunk_nb, _bootstrap_chunk_np)
class_moments = dispatch(_class_moments_nb, _class_moments_np)
