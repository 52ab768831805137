"""Kernel backend selection.

The hot integration kernels exist twice: a numba-compiled version and a
pure-numpy fallback.  The environment variable ``PHFORMATION_BACKEND``
picks one explicitly (``numba`` or ``numpy``); when unset, numba is used
if it imports and numpy otherwise.
"""

from __future__ import annotations

import os

ENV_VAR = "PHFORMATION_BACKEND"
_CHOICES = ("numba", "numpy")


def _load(name: str):
    if name == "numba":
        from . import _kernels_nb as kernels
    else:
        from . import _kernels_np as kernels
    return kernels


def get_kernels(backend: str | None = None):
    """Resolve the kernel module for ``backend`` (default: env, then numba).

    Raises
    ------
    ValueError
        If an unknown backend name is requested.
    RuntimeError
        If numba is requested explicitly but cannot be imported.
    """
    requested = backend if backend is not None else os.environ.get(ENV_VAR)
    if requested is not None:
        requested = requested.strip().lower()
        if requested not in _CHOICES:
            raise ValueError(
                f"unknown backend {requested!r}; expected one of {_CHOICES}"
            )
        if requested == "numba":
            try:
                return _load("numba")
            except ImportError as exc:
                raise RuntimeError(
                    "backend 'numba' requested but numba is not importable"
                ) from exc
        return _load("numpy")
    try:
        return _load("numba")
    except ImportError:
        return _load("numpy")


def active_backend(backend: str | None = None) -> str:
    """Name of the kernel backend that :func:`get_kernels` would return."""
    return get_kernels(backend).BACKEND_NAME
