"""Kernel backend selection.

Hot kernels exist twice: a numba ``@njit`` version and a pure-numpy version.
``OPENSETPAD_BACKEND`` picks one at import time (``numba`` or ``numpy``);
the default is numba when it imports, numpy otherwise.
"""
from __future__ import annotations

import contextlib
import logging
import os

log = logging.getLogger(__name__)

_ENV = "OPENSETPAD_BACKEND"
BACKENDS = ("numba", "numpy")

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def _initial() -> str:
    requested = os.environ.get(_ENV, "").strip().lower()
    if requested == "numpy":
        return "numpy"
    if requested not in ("", "numba"):
        raise ValueError(f"{_ENV} must be one of {BACKENDS}, got {requested!r}")
    if not HAS_NUMBA:
        if requested == "numba":
            log.warning("numba requested but not importable; using numpy kernels")
        return "numpy"
    return "numba"


_active = _initial()


def get_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not installed")
    _active = name


@contextlib.contextmanager
def use_backend(name: str):
    previous = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def njit(*args, **kwargs):
    """``numba.njit`` when numba is present, identity decorator otherwise."""
    if HAS_NUMBA:
        import numba

        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f


def dispatch(numba_impl, numpy_impl):
    """Return a callable that routes to the active backend on every call."""

    def call(*args, **kwargs):
        impl = numba_impl if _active == "numba" else numpy_impl
        return impl(*args, **kwargs)

    call.__name__ = numpy_impl.__name__
    call.__doc__ = numpy_impl.__doc__
    call.numba_impl = numba_impl
    call.numpy_impl = numpy_impl
    return call
