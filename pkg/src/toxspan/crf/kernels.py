"""Backend selection for the chain kernels.

Prefers the compiled extension and falls back to the numpy implementation
when it is not built.  ``TOXSPAN_FORCE_PYTHON_KERNELS=1`` forces the
fallback (used by the benchmark and to debug the compiled path).
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import ValidationError

if os.environ.get("TOXSPAN_FORCE_PYTHON_KERNELS") == "1":
    from . import _chain_py as _impl
else:
    try:
        from . import _chain as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _chain_py as _impl

BACKEND: str = _impl.BACKEND


def _as_inputs(psi, trans, start, stop):
    psi = np.ascontiguousarray(psi, dtype=np.float64)
    trans = np.ascontiguousarray(trans, dtype=np.float64)
    start = np.ascontiguousarray(start, dtype=np.float64)
    stop = np.ascontiguousarray(stop, dtype=np.float64)
    if psi.ndim != 2 or psi.shape[0] < 1:
        raise ValidationError(f"psi must be (n>=1, L), got shape {psi.shape}")
    L = psi.shape[1]
    if trans.shape != (L, L) or start.shape != (L,) or stop.shape != (L,):
        raise ValidationError("transition/start/stop shapes do not match psi")
    return psi, trans, start, stop


def log_partition(psi, trans, start, stop) -> float:
    """log sum over all label paths of exp(path score)."""
    return float(_impl.log_partition(*_as_inputs(psi, trans, start, stop)))


def forward_backward(psi, trans, start, stop):
    """(logZ, per-position marginals (n, L), transition marginals (n-1, L, L))."""
    logz, unary, pair = _impl.forward_backward(*_as_inputs(psi, trans, start, stop))
    return float(logz), np.asarray(unary), np.asarray(pair)


def viterbi(psi, trans, start, stop):
    """(argmax label path as int64 array, path score)."""
    path, score = _impl.viterbi(*_as_inputs(psi, trans, start, stop))
    return np.asarray(path), float(score)
