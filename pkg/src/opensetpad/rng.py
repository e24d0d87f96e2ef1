"""Counter-based random streams.

Every random quantity in the package is a pure function of an integer key and
a draw counter, so any replicate or record can be regenerated in isolation and
parallel evaluation order never changes results.

Construction (all arithmetic modulo 2**64)::

    GAMMA = 0x9E3779B97F4A7C15
    mix64(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
               z = (z ^ (z >> 27)) * 0x94D049BB133111EB
               return z ^ (z >> 31)
    word(key, i) = mix64(key + (i + 1) * GAMMA)

``word(key, i)`` is the (i+1)-th output of SplitMix64 started from state
``key``. Keys are derived by chaining: ``derive(seed, a, b) =
word(word(seed mod 2**64, a), b)``.

Derived variates:

* uniform in [0, 1): ``(w >> 11) * 2**-53``
* index in [0, n): ``min(floor(uniform * n), n - 1)``, float64 product
* standard normal for record i: Box-Muller cosine branch on words 2i, 2i+1,
  ``u1 = ((w_2i >> 11) + 1) * 2**-53``, ``u2 = (w_2i+1 >> 11) * 2**-53``,
  ``z = sqrt(-2 ln u1) * cos(2 pi u2)``
"""
from __future__ import annotations

import numpy as np

from . import _kernels

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15

# domain tags keep streams for different purposes apart under one seed
TAG_BOOTSTRAP = 0xB0075
TAG_SPLIT = 0x5B117
TAG_SCORES = 0x5C0E5
TAG_EMBED = 0xE3BED


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def word(key: int, counter: int) -> int:
    return mix64((key + (counter + 1) * GAMMA) & MASK64)


def derive(seed: int, *path: int) -> int:
    """Chain ``seed`` through ``path`` into a stream key."""
    key = seed & MASK64
    for step in path:
        key = word(key, step & MASK64)
    return key


def replicate_key(master_seed: int, replicate: int) -> int:
    return derive(master_seed, TAG_BOOTSTRAP, replicate)


def replicate_keys(master_seed: int, count: int) -> np.ndarray:
    base = derive(master_seed, TAG_BOOTSTRAP)
    return _kernels.words(np.uint64(base), 0, count)


def words(key: int, start: int, n: int) -> np.ndarray:
    return _kernels.words(np.uint64(key), start, n)


def uniforms(key: int, start: int, n: int) -> np.ndarray:
    return (words(key, start, n) >> np.uint64(11)).astype(np.float64) * _kernels.TWO_M53


def indices(key: int, start: int, n: int, bound: int) -> np.ndarray:
    if bound < 1:
        raise ValueError("bound must be positive")
    return _kernels.indices(np.uint64(key), start, n, bound)


def normals(key: int, start: int, n: int) -> np.ndarray:
    """``n`` standard normals consuming counters ``start .. start + 2n - 1``."""
    return _kernels.normals(np.uint64(key), start, n)
