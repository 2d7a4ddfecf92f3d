"""l1-norm coherence, predictability and entanglement for pure bipartite states.

For a normalized pure state the three quantities of either marginal add up to
``d - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor_core import DensityMatrix, PureState, StateError, partial_trace

NEG_TOL = 1e-10


def _matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return np.asarray(rho, dtype=np.complex128)


def _offdiag_sum(m: np.ndarray) -> float:
    return float(m[~np.eye(m.shape[0], dtype=bool)].sum())


def _offdiag_geometric_sum(diag: np.ndarray) -> float:
    s = np.sqrt(np.clip(diag.real, 0.0, None))
    return _offdiag_sum(np.outer(s, s))


def coherence_l1(rho) -> float:
    return _offdiag_sum(np.abs(_matrix(rho)))


def predictability_l1(rho) -> float:
    m = _matrix(rho)
    return m.shape[0] - 1 - _offdiag_geometric_sum(np.diag(m))


def _entanglement_from_reduced(m: np.ndarray) -> float:
    e = _offdiag_geometric_sum(np.diag(m)) - _offdiag_sum(np.abs(m))
    if e < -NEG_TOL:
        raise StateError(f"negative l1 entanglement {e:.3e}: input is not a pure state")
    return max(float(e), 0.0)


def _check_bipartite(state: PureState, side: int) -> None:
    if state.n_slots != 2:
        raise StateError(f"expected a bipartite state, got {state.n_slots} slots")
    if side not in (0, 1):
        raise StateError(f"side must be 0 or 1, got {side}")


def entanglement_l1(state: PureState, side: int = 0) -> float:
    """Entanglement from the computational-basis marginal of ``side``.

    This entrywise form matches the basis-independent value
    (:func:`schmidt_entanglement_l1`) and is the same for both sides when the
    marginals are diagonal, as for Schmidt-form pairs. For generic states the
    two sides can disagree.
    """
    _check_bipartite(state, side)
    return _entanglement_from_reduced(partial_trace(state, [side]).matrix)


def schmidt_entanglement_l1(state: PureState) -> float:
    """``sum_{j != k} s_j s_k`` over the Schmidt coefficients ``s``."""
    _check_bipartite(state, 0)
    s = np.linalg.svd(state.as_tensor(), compute_uv=False)
    return _offdiag_sum(np.outer(s, s))


@dataclass(frozen=True)
class CCRBreakdown:
    coherence: float
    predictability: float
    entanglement: float
    d: int

    @property
    def sum(self) -> float:
        return self.coherence + self.predictability + self.entanglement

    @property
    def deficit(self) -> float:
        """``sum - (d - 1)``; zero for normalized pure states."""
        return self.sum - (self.d - 1)

    def normalized(self) -> tuple[float, float, float]:
        """(coherence, predictability, entanglement) each divided by ``d - 1``."""
        k = self.d - 1
        return self.coherence / k, self.predictability / k, self.entanglement / k

    def as_dict(self) -> dict:
        return {
            "coherence": self.coherence,
            "predictability": self.predictability,
            "entanglement": self.entanglement,
            "sum": self.sum,
            "d": self.d,
        }


def ccr_check(state: PureState, side: int = 0) -> CCRBreakdown:
    _check_bipartite(state, side)
    m = partial_trace(state, [side]).matrix
    return CCRBreakdown(
        coherence=coherence_l1(m),
        predictability=predictability_l1(m),
        entanglement=_entanglement_from_reduced(m),
        d=state.d,
    )


def ccr_both(state: PureState) -> tuple[CCRBreakdown, CCRBreakdown]:
    """Breakdowns for both marginals; coherence and predictability may differ."""
    return ccr_check(state, 0), ccr_check(state, 1)
