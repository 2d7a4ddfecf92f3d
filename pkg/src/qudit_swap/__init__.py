"""Exact simulation of entanglement swapping on partially entangled qudit pairs."""

from .ccr import CCRBreakdown, ccr_both, ccr_check, coherence_l1, entanglement_l1, predictability_l1
from .conjecture import ScanConfig, ScanResult, per_index_inequality_check, ratio, scan
from .gates import bell_basis, bell_state, bell_state_via_circuit, controlled_shift, fourier, shift
from .oracle import compare, simulate_full, verify
from .protocol import (
    SchmidtCoeffs,
    average_entanglement,
    evaluate_bounds,
    initial_state,
    outcome_probability,
    post_bbm_entanglement,
    post_bbm_state,
    qubit_coeffs,
    qubit_scan,
    run_protocol,
)
from .tensor_core import DensityMatrix, PureState, inner, make_state, partial_trace, project, tensor

__version__ = "0.1.0"
