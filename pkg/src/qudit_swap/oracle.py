"""Brute-force statevector check of the closed-form swapping results.

The four-qudit register is built literally as ``|xi>_AC (x) |eta>_C'B``,
reordered to (A, B, C, C'), and projected onto circuit-built Bell states.
Nothing here uses the closed-form probability or entanglement expressions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .ccr import entanglement_l1
from .gates import bell_basis
from .protocol import DEGENERATE_TOL, SchmidtCoeffs, run_protocol
from .tensor_core import MAX_TOTAL_DIM, PureState, StateError, make_state, permute_slots, project, tensor

# (A, C, C', B) -> (A, B, C, C')
_REGROUP = (0, 3, 1, 2)


@dataclass(frozen=True, eq=False)
class OracleOutcome:
    p: int
    q: int
    probability: float
    residual: PureState
    post_state: PureState | None
    entanglement: float
    degenerate: bool


@dataclass(frozen=True, eq=False)
class OracleReport:
    d: int
    initial_entanglement_xi: float
    initial_entanglement_eta: float
    outcomes: tuple[OracleOutcome, ...]
    avg_entanglement: float
    max_abs_deviation: float | None = None

    @property
    def total_probability(self) -> float:
        return float(sum(o.probability for o in self.outcomes))

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "initial_entanglement_xi": self.initial_entanglement_xi,
            "initial_entanglement_eta": self.initial_entanglement_eta,
            "avg_entanglement": self.avg_entanglement,
            "max_abs_deviation": self.max_abs_deviation,
            "outcomes": [
                {"p": o.p, "q": o.q, "probability": o.probability,
                 "entanglement": o.entanglement, "degenerate": o.degenerate}
                for o in self.outcomes
            ],
        }


def _pair(c: SchmidtCoeffs) -> PureState:
    d = c.d
    amps = np.zeros((d, d), dtype=np.complex128)
    np.fill_diagonal(amps, c.coeffs)
    return make_state(amps.ravel(), (d, d))


def full_register(xi: SchmidtCoeffs, eta: SchmidtCoeffs) -> PureState:
    """``|xi>_AC (x) |eta>_C'B`` with slots regrouped to (A, B, C, C')."""
    if xi.d != eta.d:
        raise StateError(f"pair dimensions differ: {xi.d} vs {eta.d}")
    if xi.d**4 > MAX_TOTAL_DIM:
        raise StateError(f"d={xi.d} gives a register above {MAX_TOTAL_DIM} amplitudes")
    return permute_slots(tensor(_pair(xi), _pair(eta)), _REGROUP)


def simulate_full(xi: SchmidtCoeffs, eta: SchmidtCoeffs) -> OracleReport:
    psi = full_register(xi, eta)
    d = xi.d
    outcomes = []
    for idx, bell in enumerate(bell_basis(d, via_circuit=True)):
        p, q = divmod(idx, d)
        residual, weight = project(psi, bell, (2, 3))
        if weight <= DEGENERATE_TOL:
            outcomes.append(OracleOutcome(p, q, weight, residual, None, 0.0, True))
            continue
        post = residual.normalized()
        outcomes.append(OracleOutcome(p, q, weight, residual, post, entanglement_l1(post, 0), False))
    avg = float(sum(o.probability * o.entanglement for o in outcomes))
    return OracleReport(
        d=d,
        initial_entanglement_xi=entanglement_l1(_pair(xi), 0),
        initial_entanglement_eta=entanglement_l1(_pair(eta), 1),
        outcomes=tuple(outcomes),
        avg_entanglement=avg,
    )


def _deviation(report, oracle: OracleReport) -> float:
    dev = abs(report.bounds.avg_entanglement - oracle.avg_entanglement)
    for a, b in zip(report.outcomes, oracle.outcomes):
        dev = max(dev, abs(a.probability - b.probability), abs(a.entanglement - b.entanglement))
    return float(dev)


def verify(xi: SchmidtCoeffs, eta: SchmidtCoeffs) -> OracleReport:
    """:func:`simulate_full` with ``max_abs_deviation`` against the closed form filled in."""
    oracle = simulate_full(xi, eta)
    return replace(oracle, max_abs_deviation=_deviation(run_protocol(xi, eta), oracle))


def compare(xi: SchmidtCoeffs, eta: SchmidtCoeffs) -> float:
    """Largest |closed form - brute force| over probabilities, entanglements and the average."""
    return verify(xi, eta).max_abs_deviation
