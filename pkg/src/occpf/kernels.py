"""Backend selection for the per-step kernels.

The compiled extension ``occpf._ckernels`` is used when it was built;
otherwise the pure-Python ``occpf._pykernels`` is used. Callers go through
the module-level functions below, so :func:`set_backend` takes effect
immediately for every subsequent call.
"""
from __future__ import annotations

import importlib
import logging
from types import ModuleType

from . import _pykernels

log = logging.getLogger(__name__)

try:
    from . import _ckernels  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _ckernels = None

_impl: ModuleType = _ckernels if _ckernels is not None else _pykernels


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _ckernels is not None else [])


def backend() -> str:
    return _impl.BACKEND


def set_backend(name: str) -> None:
    """Select ``"python"`` or ``"compiled"``."""
    global _impl
    if name == "python":
        _impl = _pykernels
    elif name == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        _impl = _ckernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    log.debug("kernel backend set to %s", name)


def get_module(name: str | None = None) -> ModuleType:
    if name is None:
        return _impl
    return _pykernels if name == "python" else importlib.import_module("occpf._ckernels")


def obstacle_field(dx, dy, sx, sy, eps, literal):
    return _impl.obstacle_field(dx, dy, sx, sy, eps, literal)


def edge_term(d, xi, f_cap):
    return _impl.edge_term(d, xi, f_cap)


def net_force(*args):
    return _impl.net_force(*args)


def bicycle_step(*args):
    return _impl.bicycle_step(*args)


def silhouette(ex, ey, occ):
    return _impl.silhouette(ex, ey, occ)


def in_shadow(ex, ey, occ, i_lo, i_hi, px, py):
    return _impl.in_shadow(ex, ey, occ, i_lo, i_hi, px, py)


def hidden_by(ex, ey, occ, target):
    return _impl.hidden_by(ex, ey, occ, target)
