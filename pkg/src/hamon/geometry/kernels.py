"""Kernel selection: compiled double-description core when importable,
pure Python otherwise.  ``HAMON_PURE=1`` forces the fallback."""
from __future__ import annotations

import os

from . import _ddpy

BACKEND = "python"
_impl = _ddpy

if os.environ.get("HAMON_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ddcore  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        pass
    else:
        _impl = _ddcore
        BACKEND = "cython"


def available() -> list[str]:
    out = ["python"]
    try:
        from . import _ddcore  # type: ignore[attr-defined]  # noqa: F401
    except ImportError:
        return out
    return ["cython"] + out


def active() -> str:
    return BACKEND


def use(name: str) -> str:
    """Switch kernels (``"cython"`` or ``"python"``); returns the previous name."""
    global _impl, BACKEND
    prev = BACKEND
    if name == "python":
        _impl = _ddpy
    elif name == "cython":
        from . import _ddcore  # type: ignore[attr-defined]

        _impl = _ddcore
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    BACKEND = name
    return prev


dot = _ddpy.dot
normalize = _ddpy.normalize
echelon = _ddpy.echelon
transpose_sat = _ddpy.transpose_sat


def add_rows(lines, rays, sats, nbits, eqs, ineqs, need_point=False):
    try:
        return _impl.add_rows(lines, rays, sats, nbits, eqs, ineqs, need_point)
    except OverflowError:
        # compiled core works on machine words; fall back on big coefficients
        return _ddpy.add_rows(lines, rays, sats, nbits, eqs, ineqs, need_point)


def minimize(glines, grays, eqs, ineqs):
    try:
        return _impl.minimize(glines, grays, eqs, ineqs)
    except OverflowError:
        return _ddpy.minimize(glines, grays, eqs, ineqs)
