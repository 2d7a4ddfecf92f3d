"""Batched closed-form kernels for scans.

Each kernel has a numba implementation and a pure-numpy one with identical
signatures. The numba path is used unless ``QUDIT_SWAP_DISABLE_NUMBA`` is set
to a true value or numba cannot be imported. ``QUDIT_SWAP_THREADS`` caps the
numba thread pool.

Inputs are coefficient *moduli*, shape ``(n, d)``; every protocol quantity
depends on moduli only.
"""

from __future__ import annotations

import os

import numpy as np


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    import numba
    from numba import njit, prange
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _env_flag("QUDIT_SWAP_DISABLE_NUMBA")

if HAVE_NUMBA and "NUMBA_THREADING_LAYER" not in os.environ:
    # probing an outdated TBB emits a warning on every import
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

if HAVE_NUMBA and os.environ.get("QUDIT_SWAP_THREADS"):
    numba.set_num_threads(max(1, min(int(os.environ["QUDIT_SWAP_THREADS"]), numba.config.NUMBA_NUM_THREADS)))


# --- numpy path -------------------------------------------------------------

_CHUNK = 4096


def _offdiag_sum_numpy(a: np.ndarray) -> np.ndarray:
    d = a.shape[-1]
    mask = ~np.eye(d, dtype=bool)
    return (a[..., :, None] * a[..., None, :] * mask).sum(axis=(-2, -1))


def pair_entanglement_numpy(mod: np.ndarray) -> np.ndarray:
    return _offdiag_sum_numpy(np.asarray(mod, dtype=np.float64))


def swap_tables_numpy(cmod: np.ndarray, dmod: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    cmod = np.asarray(cmod, dtype=np.float64)
    dmod = np.asarray(dmod, dtype=np.float64)
    n, d = cmod.shape
    idx = (np.arange(d)[:, None] + np.arange(d)[None, :]) % d  # [p, k] -> p+k mod d
    prob = np.empty((n, d))
    wsum = np.empty((n, d))
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        a = cmod[lo:hi][:, idx] * dmod[lo:hi, None, :]
        prob[lo:hi] = (a * a).sum(axis=-1) / d
        wsum[lo:hi] = _offdiag_sum_numpy(a)
    return prob, wsum


# --- numba path -------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def pair_entanglement_numba(mod):
        n, d = mod.shape
        out = np.empty(n)
        for i in prange(n):
            s = 0.0
            for j in range(d):
                for k in range(d):
                    if j != k:
                        s += mod[i, j] * mod[i, k]
            out[i] = s
        return out

    @njit(cache=True, parallel=True)
    def swap_tables_numba(cmod, dmod):
        n, d = cmod.shape
        prob = np.empty((n, d))
        wsum = np.empty((n, d))
        for i in prange(n):
            a = np.empty(d)
            for p in range(d):
                sq = 0.0
                for k in range(d):
                    a[k] = cmod[i, (p + k) % d] * dmod[i, k]
                    sq += a[k] * a[k]
                s = 0.0
                for j in range(d):
                    for k in range(d):
                        if j != k:
                            s += a[j] * a[k]
                prob[i, p] = sq / d
                wsum[i, p] = s
        return prob, wsum

else:  # pragma: no cover
    pair_entanglement_numba = pair_entanglement_numpy
    swap_tables_numba = swap_tables_numpy


def pair_entanglement(mod: np.ndarray) -> np.ndarray:
    """Row-wise ``sum_{j != k} |a_j a_k|``."""
    mod = np.ascontiguousarray(mod, dtype=np.float64)
    if USE_NUMBA:
        return pair_entanglement_numba(mod)
    return pair_entanglement_numpy(mod)


def swap_tables(cmod: np.ndarray, dmod: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-``p`` outcome probability (for one ``q``) and off-diagonal weight sum.

    Returns ``(prob, wsum)``, both ``(n, d)``. ``prob[i, p]`` is the probability
    of any single ``(p, q)`` outcome and ``wsum[i, p]`` is
    ``sum_{j != k} |c_{p+j} c_{p+k} d_j d_k|``; the average post-measurement
    entanglement is ``wsum.sum(axis=1)``.
    """
    cmod = np.ascontiguousarray(cmod, dtype=np.float64)
    dmod = np.ascontiguousarray(dmod, dtype=np.float64)
    if cmod.shape != dmod.shape or cmod.ndim != 2:
        raise ValueError(f"coefficient batches must share shape (n, d): {cmod.shape} vs {dmod.shape}")
    if USE_NUMBA:
        return swap_tables_numba(cmod, dmod)
    return swap_tables_numpy(cmod, dmod)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
