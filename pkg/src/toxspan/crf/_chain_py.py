"""Pure-numpy chain kernels: the fallback backend for toxspan.crf.kernels.

Same contracts as the compiled module in _chain.pyx; everything operates on
float64 arrays with shapes psi (n, L), trans (L, L), start (L,), stop (L,).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    m = a.max(axis=axis, keepdims=True)
    out = np.log(np.exp(a - m).sum(axis=axis)) + np.squeeze(m, axis=axis)
    return out


def log_partition(psi, trans, start, stop) -> float:
    alpha = start + psi[0]
    for t in range(1, psi.shape[0]):
        alpha = psi[t] + _logsumexp(alpha[:, None] + trans, axis=0)
    return float(_logsumexp(alpha + stop, axis=0))


def forward_backward(psi, trans, start, stop):
    """Return (logZ, unary marginals (n, L), pairwise marginals (n-1, L, L))."""
    n, L = psi.shape
    alpha = np.empty((n, L))
    alpha[0] = start + psi[0]
    for t in range(1, n):
        alpha[t] = psi[t] + _logsumexp(alpha[t - 1][:, None] + trans, axis=0)
    logz = float(_logsumexp(alpha[-1] + stop, axis=0))

    beta = np.empty((n, L))
    beta[-1] = stop
    for t in range(n - 2, -1, -1):
        beta[t] = _logsumexp(trans + (psi[t + 1] + beta[t + 1])[None, :], axis=1)

    unary = np.exp(alpha + beta - logz)
    pairwise = np.empty((max(n - 1, 0), L, L))
    for t in range(n - 1):
        pairwise[t] = np.exp(
            alpha[t][:, None] + trans + (psi[t + 1] + beta[t + 1])[None, :] - logz
        )
    return logz, unary, pairwise


def viterbi(psi, trans, start, stop):
    """Return (best path as int64 array, its score). Ties pick the lower
    label index (np.argmax keeps the first maximum)."""
    n, L = psi.shape
    delta = start + psi[0]
    backptr = np.empty((n, L), dtype=np.int64)
    for t in range(1, n):
        scores = delta[:, None] + trans
        backptr[t] = scores.argmax(axis=0)
        delta = scores.max(axis=0) + psi[t]
    final = delta + stop
    best = int(final.argmax())
    score = float(final[best])
    path = np.empty(n, dtype=np.int64)
    path[-1] = best
    for t in range(n - 1, 0, -1):
        path[t - 1] = backptr[t, path[t]]
    return path, score
