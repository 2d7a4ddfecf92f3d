"""Dense pure states on registers of equal-dimension qudits.

Amplitudes are stored row-major with slot 0 as the most significant digit, so
``tensor`` is exactly ``np.kron`` and a register of ``n`` qudits reshapes to an
``(d,) * n`` tensor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
MAX_TOTAL_DIM = 10**6


class StateError(ValueError):
    """Invalid amplitudes, layout, or slot selection."""


def _validate_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(x) for x in dims)
    if not dims:
        raise StateError("register needs at least one slot")
    if any(x < 2 for x in dims):
        raise StateError(f"qudit dimension must be >= 2, got {dims}")
    if len(set(dims)) != 1:
        raise StateError(f"mixed-dimension registers are not supported: {dims}")
    total = int(np.prod(dims, dtype=np.int64))
    if total > MAX_TOTAL_DIM:
        raise StateError(f"register dimension {total} exceeds cap {MAX_TOTAL_DIM}")
    return dims


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Amplitude vector on a register; possibly unnormalized.

    ``norm_sq`` is always the squared norm of ``amps``. States produced by
    :func:`make_state` have ``norm_sq`` within ``NORM_TOL`` of one; residuals
    from :func:`project` carry their weight here instead of being rescaled.
    """

    dims: tuple[int, ...]
    amps: np.ndarray
    norm_sq: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", _validate_dims(self.dims))
        amps = _frozen(np.ravel(self.amps))
        if amps.size != int(np.prod(self.dims)):
            raise StateError(f"{amps.size} amplitudes do not fit dims {self.dims}")
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "norm_sq", float(np.vdot(amps, amps).real))

    @property
    def d(self) -> int:
        return self.dims[0]

    @property
    def n_slots(self) -> int:
        return len(self.dims)

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_sq - 1.0) <= NORM_TOL

    def normalized(self) -> PureState:
        if self.norm_sq <= 0.0:
            raise StateError("cannot normalize the zero vector")
        return PureState(self.dims, self.amps / np.sqrt(self.norm_sq))

    def as_tensor(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def __repr__(self):
        return f"PureState(dims={self.dims}, norm_sq={self.norm_sq:.6g})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Reduced density operator on one or more kept slots."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dims", _validate_dims(self.dims))
        m = _frozen(self.matrix)
        n = int(np.prod(self.dims))
        if m.shape != (n, n):
            raise StateError(f"matrix shape {m.shape} does not match dims {self.dims}")
        object.__setattr__(self, "matrix", m)

    @property
    def d(self) -> int:
        """Total dimension of the operator (equal to the qudit dimension for one slot)."""
        return self.matrix.shape[0]

    def check(self, herm_tol=1e-12, trace_tol=1e-12, eig_tol=1e-10) -> None:
        """Raise ``StateError`` unless Hermitian, unit-trace and positive semidefinite."""
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > herm_tol:
            raise StateError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > trace_tol:
            raise StateError(f"density matrix trace {np.trace(m).real:.3e} != 1")
        if np.linalg.eigvalsh(m).min() < -eig_tol:
            raise StateError("density matrix has a negative eigenvalue")


def make_state(amps, dims: Sequence[int], normalize: bool = False) -> PureState:
    """Build a normalized :class:`PureState`.

    With ``normalize=True`` any nonzero vector is rescaled; otherwise the squared
    norm must already be within ``NORM_TOL`` of one.
    """
    vec = np.asarray(amps, dtype=np.complex128).ravel()
    dims = _validate_dims(dims)
    if vec.size != int(np.prod(dims)):
        raise StateError(f"{vec.size} amplitudes do not fit dims {dims}")
    nrm = float(np.vdot(vec, vec).real)
    if nrm == 0.0:
        raise StateError("zero vector is not a state")
    if normalize:
        vec = vec / np.sqrt(nrm)
    elif abs(nrm - 1.0) > NORM_TOL:
        raise StateError(f"squared norm {nrm!r} is not 1 (pass normalize=True)")
    return PureState(dims, vec)


def basis_state(indices: Sequence[int], d: int) -> PureState:
    """Computational basis state ``|i0 i1 ...>``."""
    dims = (d,) * len(indices)
    vec = np.zeros(d ** len(indices), dtype=np.complex128)
    vec[np.ravel_multi_index(tuple(indices), dims)] = 1.0
    return PureState(dims, vec)


def tensor(a: PureState, b: PureState) -> PureState:
    if a.d != b.d:
        raise StateError(f"cannot join registers of dimension {a.d} and {b.d}")
    return PureState(a.dims + b.dims, np.kron(a.amps, b.amps))


def inner(a: PureState, b: PureState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.dims != b.dims:
        raise StateError(f"dims mismatch: {a.dims} vs {b.dims}")
    return complex(np.vdot(a.amps, b.amps))


def permute_slots(state: PureState, order: Sequence[int]) -> PureState:
    """Reorder register slots: new slot ``i`` is old slot ``order[i]``."""
    order = tuple(order)
    if sorted(order) != list(range(state.n_slots)):
        raise StateError(f"{order} is not a permutation of {state.n_slots} slots")
    t = np.transpose(state.as_tensor(), order)
    return PureState(tuple(state.dims[i] for i in order), t.ravel())


def _check_slots(state: PureState, slots: Iterable[int]) -> tuple[int, ...]:
    slots = tuple(int(s) for s in slots)
    if not slots:
        raise StateError("slot selection is empty")
    if len(set(slots)) != len(slots):
        raise StateError(f"repeated slots in {slots}")
    for s in slots:
        if not 0 <= s < state.n_slots:
            raise StateError(f"slot {s} out of range for {state.n_slots}-slot register")
    return slots


def partial_trace(state: PureState, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density operator on ``keep`` (kept slots in ascending order)."""
    keep = tuple(sorted(_check_slots(state, keep)))
    rest = [s for s in range(state.n_slots) if s not in keep]
    d = state.d
    t = np.transpose(state.as_tensor(), keep + tuple(rest))
    m = t.reshape(d ** len(keep), -1)
    return DensityMatrix((d,) * len(keep), m @ m.conj().T)


def project(state: PureState, target: PureState, slots: Sequence[int]) -> tuple[PureState, float]:
    """Apply ``<target|`` on ``slots``.

    Returns the unnormalized residual on the remaining slots (original order)
    and its squared norm, which is the outcome probability for a normalized
    ``state``.
    """
    slots = _check_slots(state, slots)
    if target.dims != tuple(state.dims[s] for s in slots):
        raise StateError(f"target dims {target.dims} do not match slots {slots}")
    rest = tuple(s for s in range(state.n_slots) if s not in slots)
    if not rest:
        raise StateError("projection must leave at least one slot")
    t = np.transpose(state.as_tensor(), rest + slots)
    m = t.reshape(-1, target.amps.size)
    residual = PureState(tuple(state.dims[s] for s in rest), m @ target.amps.conj())
    return residual, residual.norm_sq


def apply_unitary(state: PureState, unitary: np.ndarray) -> PureState:
    """Apply a full-register matrix."""
    u = np.asarray(unitary)
    if u.shape != (state.amps.size, state.amps.size):
        raise StateError(f"gate shape {u.shape} does not match register size {state.amps.size}")
    return PureState(state.dims, u @ state.amps)
