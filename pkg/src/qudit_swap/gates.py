"""Qudit Fourier, shift and controlled-shift gates, and the generalized Bell basis.

``bell_state`` writes the closed form directly; ``bell_state_via_circuit``
applies the Fourier gate to qudit B and a B-controlled shift on A to ``|pq>``.
The two must agree including global phase.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .tensor_core import PureState, StateError, apply_unitary, basis_state


def _check_dim(d: int) -> int:
    d = int(d)
    if d < 2:
        raise StateError(f"qudit dimension must be >= 2, got {d}")
    return d


def omega_powers(d: int, exponents) -> np.ndarray:
    """``exp(2 pi i n / d)`` with the exponent reduced mod ``d`` first."""
    n = np.mod(np.asarray(exponents, dtype=np.int64), d)
    table = np.exp(2j * np.pi * np.arange(d) / d)
    # make multiples of a quarter turn exact (-1, +-i) instead of carrying 1e-16 residue
    table.real[np.abs(table.real) < 1e-15] = 0.0
    table.imag[np.abs(table.imag) < 1e-15] = 0.0
    return table[n]


def fourier(d: int) -> np.ndarray:
    d = _check_dim(d)
    j = np.arange(d)
    return omega_powers(d, np.outer(j, j)) / np.sqrt(d)


def shift(d: int, j: int) -> np.ndarray:
    """``X(j)|k> = |j+k mod d>``."""
    d = _check_dim(d)
    if not 0 <= j < d:
        raise StateError(f"shift amount {j} outside [0, {d})")
    k = np.arange(d)
    u = np.zeros((d, d), dtype=np.complex128)
    u[(k + j) % d, k] = 1.0
    return u


def controlled_shift(d: int, control: int, target: int) -> np.ndarray:
    """Two-qudit controlled shift ``sum_j |j><j| (x) X(j)`` on a 2-slot register.

    ``control=0, target=1`` maps ``|j k> -> |j, j+k>``; ``control=1, target=0``
    maps ``|j k> -> |j+k, k>``.
    """
    d = _check_dim(d)
    if {control, target} != {0, 1}:
        raise StateError(f"control/target must be distinct slots of a pair, got {control}, {target}")
    a, b = np.divmod(np.arange(d * d), d)
    if control == 0:
        out = a * d + (a + b) % d
    else:
        out = ((a + b) % d) * d + b
    u = np.zeros((d * d, d * d), dtype=np.complex128)
    u[out, np.arange(d * d)] = 1.0
    return u


def is_unitary(u: np.ndarray, tol: float = 1e-12) -> bool:
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def _check_index(d: int, p: int, q: int) -> None:
    if not (0 <= p < d and 0 <= q < d):
        raise StateError(f"Bell index ({p}, {q}) outside [0, {d})")


def bell_state(d: int, p: int, q: int) -> PureState:
    """``(1/sqrt d) sum_j w^{jq} |p+j>|j>``."""
    d = _check_dim(d)
    _check_index(d, p, q)
    j = np.arange(d)
    amps = np.zeros(d * d, dtype=np.complex128)
    amps[((p + j) % d) * d + j] = omega_powers(d, j * q) / np.sqrt(d)
    return PureState((d, d), amps)


@lru_cache(maxsize=32)
def _circuit(d: int) -> np.ndarray:
    return controlled_shift(d, 1, 0) @ np.kron(np.eye(d), fourier(d))


def bell_state_via_circuit(d: int, p: int, q: int) -> PureState:
    d = _check_dim(d)
    _check_index(d, p, q)
    return apply_unitary(basis_state((p, q), d), _circuit(d))


@lru_cache(maxsize=32)
def _basis(d: int, via_circuit: bool) -> tuple[PureState, ...]:
    make = bell_state_via_circuit if via_circuit else bell_state
    return tuple(make(d, p, q) for p in range(d) for q in range(d))


def bell_basis(d: int, via_circuit: bool = False) -> list[PureState]:
    """All ``d**2`` Bell states ordered by ``(p, q)`` with ``q`` fastest."""
    return list(_basis(_check_dim(d), bool(via_circuit)))


def bell_gram(d: int, via_circuit: bool = False) -> np.ndarray:
    m = np.stack([s.amps for s in bell_basis(d, via_circuit)])
    return m.conj() @ m.T
