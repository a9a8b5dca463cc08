"""Kernel backend selection.

The compiled backend (Cython, int64) is used when it imported cleanly
and the environment variable ``BTQ_PURE`` is unset.  Inputs whose
intermediate values outgrow int64 are retried on the pure backend, so
results never depend on which backend happens to be installed.
"""

import os

from . import _core_py as _py

_compiled = None
if not os.environ.get("BTQ_PURE"):
    try:
        from . import _core as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"

# transforms are reference-path only: always arbitrary precision
snf_transform = _py.snf_transform

_I64_SAFE = 1 << 55


def _fits_i64(rows):
    return all(-_I64_SAFE < v < _I64_SAFE for r in rows for v in r)


def snf_diagonal(rows):
    """Invariant factors d_1 | d_2 | ... of an integer matrix."""
    rows = [list(r) for r in rows]
    if _compiled is not None and _fits_i64(rows):
        try:
            return _compiled.snf_diagonal(rows)
        except OverflowError:
            pass
    return _py.snf_diagonal(rows)


def rank_mod_p(rows, p):
    """Rank over F_p (p prime)."""
    rows = [list(r) for r in rows]
    if _compiled is not None and p < (1 << 30) and _fits_i64(rows):
        return _compiled.rank_mod_p(rows, p)
    return _py.rank_mod_p(rows, p)
