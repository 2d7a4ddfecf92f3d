"""Closed-form entanglement swapping on two Schmidt-form qudit pairs.

Pair AC is ``sum_j c_j |jj>`` and pair C'B is ``sum_k d_k |kk>``. Charlie
measures (C, C') in the generalized Bell basis; outcome ``(p, q)`` leaves
(A, B) in a state supported on ``|p+k, k>``. Every probability and
entanglement depends only on ``|c_j|`` and ``|d_k|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .ccr import CCRBreakdown, ccr_check
from .gates import omega_powers
from .tensor_core import NORM_TOL, PureState, StateError, make_state

DEGENERATE_TOL = 1e-12
BOUND_TOL = 1e-9


class DegenerateOutcomeError(ValueError):
    """Requested the post-measurement state of a zero-probability outcome."""


@dataclass(frozen=True, eq=False)
class SchmidtCoeffs:
    """Normalized coefficient vector of one pair ``sum_j c_j |jj>``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128, copy=True).ravel()
        if c.size < 2:
            raise StateError(f"need at least 2 coefficients, got {c.size}")
        nrm = float(np.sum(np.abs(c) ** 2))
        if abs(nrm - 1.0) > NORM_TOL:
            raise StateError(f"coefficients have squared norm {nrm!r}, expected 1")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_values(cls, values, normalize: bool = False) -> SchmidtCoeffs:
        c = np.asarray(values, dtype=np.complex128).ravel()
        if normalize:
            nrm = np.sqrt(np.sum(np.abs(c) ** 2))
            if nrm == 0.0:
                raise StateError("zero coefficient vector")
            c = c / nrm
        return cls(c)

    @property
    def d(self) -> int:
        return self.coeffs.size

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.coeffs)

    def pair_state(self) -> PureState:
        """The two-qudit state ``sum_j c_j |jj>``."""
        d = self.d
        amps = np.zeros(d * d, dtype=np.complex128)
        amps[np.arange(d) * (d + 1)] = self.coeffs
        return make_state(amps, (d, d))

    def entanglement(self) -> float:
        """``sum_{j != k} |c_j c_k|``."""
        a = self.moduli
        g = np.outer(a, a)
        np.fill_diagonal(g, 0.0)
        return float(g.sum())

    def __repr__(self):
        return f"SchmidtCoeffs({np.array2string(self.coeffs, precision=6)})"


def qubit_coeffs(x: float) -> SchmidtCoeffs:
    """``sqrt(x)|00> + sqrt(1-x)|11>``."""
    if not 0.0 <= x <= 1.0:
        raise StateError(f"x={x} outside [0, 1]")
    return SchmidtCoeffs([np.sqrt(x), np.sqrt(1.0 - x)])


def uniform_coeffs(d: int) -> SchmidtCoeffs:
    return SchmidtCoeffs(np.full(d, 1.0 / np.sqrt(d)))


def _check_pair(xi: SchmidtCoeffs, eta: SchmidtCoeffs) -> int:
    if xi.d != eta.d:
        raise StateError(f"pair dimensions differ: {xi.d} vs {eta.d}")
    return xi.d


def _check_index(d: int, p: int, q: int) -> None:
    if not (0 <= p < d and 0 <= q < d):
        raise StateError(f"Bell index ({p}, {q}) outside [0, {d})")


def initial_state(xi: SchmidtCoeffs, eta: SchmidtCoeffs) -> PureState:
    """Four-qudit state on slots (A, B, C, C'): amplitude ``c_j d_k`` on ``|j k j k>``."""
    d = _check_pair(xi, eta)
    amps = np.zeros((d, d, d, d), dtype=np.complex128)
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    amps[j, k, j, k] = np.outer(xi.coeffs, eta.coeffs)
    return make_state(amps.ravel(), (d,) * 4)


def _shifted(xi: SchmidtCoeffs, p: int) -> np.ndarray:
    """``c_{p+k}`` for ``k = 0..d-1``."""
    return np.roll(xi.coeffs, -p)


def outcome_probability(xi: SchmidtCoeffs, eta: SchmidtCoeffs, p: int, q: int) -> float:
    """``(1/d) sum_k |c_{p+k}|^2 |d_k|^2``; independent of ``q``."""
    d = _check_pair(xi, eta)
    _check_index(d, p, q)
    return float(np.sum(np.abs(_shifted(xi, p)) ** 2 * np.abs(eta.coeffs) ** 2) / d)


def post_bbm_state(xi: SchmidtCoeffs, eta: SchmidtCoeffs, p: int, q: int) -> PureState:
    """Normalized (A, B) state after outcome ``(p, q)``.

    Amplitude on ``|p+k, k>`` is ``c_{p+k} d_k conj(w)^{qk} / sqrt(d Pr)``,
    exactly the residual left by projecting onto the Bell state.
    """
    d = _check_pair(xi, eta)
    pr = outcome_probability(xi, eta, p, q)
    if pr <= DEGENERATE_TOL:
        raise DegenerateOutcomeError(f"outcome ({p}, {q}) has probability {pr:.3e}")
    k = np.arange(d)
    amps = np.zeros(d * d, dtype=np.complex128)
    amps[((p + k) % d) * d + k] = _shifted(xi, p) * eta.coeffs * omega_powers(d, -q * k) / np.sqrt(d * pr)
    return PureState((d, d), amps)


def _weighted_offdiag(xi: SchmidtCoeffs, eta: SchmidtCoeffs, p: int) -> float:
    a = np.abs(_shifted(xi, p) * eta.coeffs)
    g = np.outer(a, a)
    np.fill_diagonal(g, 0.0)
    return float(g.sum())


def post_bbm_entanglement(xi: SchmidtCoeffs, eta: SchmidtCoeffs, p: int, q: int) -> tuple[float, bool]:
    """Entanglement of the post-measurement state and a degenerate flag.

    Degenerate outcomes (probability at most ``DEGENERATE_TOL``) give
    ``(0.0, True)``.
    """
    d = _check_pair(xi, eta)
    pr = outcome_probability(xi, eta, p, q)
    if pr <= DEGENERATE_TOL:
        return 0.0, True
    return _weighted_offdiag(xi, eta, p) / (pr * d), False


def average_entanglement(xi: SchmidtCoeffs, eta: SchmidtCoeffs) -> float:
    """Probability-weighted post-measurement entanglement over all ``d**2`` outcomes.

    The ``q`` sum cancels the ``1/d``, leaving
    ``sum_p sum_{j != k} |c_{p+j} c_{p+k} d_j d_k|``.
    """
    d = _check_pair(xi, eta)
    return float(sum(_weighted_offdiag(xi, eta, p) for p in range(d)))


@dataclass(frozen=True, eq=False)
class BBMOutcome:
    p: int
    q: int
    probability: float
    post_state: PureState | None
    entanglement: float
    degenerate: bool

    def as_dict(self) -> dict:
        out = {
            "p": self.p,
            "q": self.q,
            "probability": self.probability,
            "entanglement": self.entanglement,
            "degenerate": self.degenerate,
            "post_state": None,
        }
        if self.post_state is not None:
            out["post_state"] = [[z.real, z.imag] for z in self.post_state.amps.tolist()]
        return out


CONFIRMED = "CONFIRMED-ON-SAMPLE"
VIOLATED = "VIOLATED"


@dataclass(frozen=True)
class BoundReport:
    """Average entanglement against every upper bound.

    ``per_outcome_bounds[i]`` belongs to outcome ``i`` (``q`` fastest) and is
    ``None`` for degenerate outcomes or when either pair is unentangled. The
    ``avg_le_conjecture`` flag is a hypothesis check, also summarized in
    ``conjecture_status``.
    """

    d: int
    avg_entanglement: float
    bound_xi: float
    bound_eta: float
    bound_product: float
    bound_conjecture: float
    per_outcome_bounds: tuple
    flags: dict
    conjecture_status: str
    tol: float = BOUND_TOL

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "avg_entanglement": self.avg_entanglement,
            "bound_xi": self.bound_xi,
            "bound_eta": self.bound_eta,
            "bound_product": self.bound_product,
            "bound_conjecture": self.bound_conjecture,
            "per_outcome_bounds": list(self.per_outcome_bounds),
            "flags": dict(self.flags),
            "conjecture_status": self.conjecture_status,
            "tol": self.tol,
        }


def _outcomes(xi: SchmidtCoeffs, eta: SchmidtCoeffs, with_states: bool = True) -> list[BBMOutcome]:
    d = _check_pair(xi, eta)
    out = []
    for p in range(d):
        for q in range(d):
            pr = outcome_probability(xi, eta, p, q)
            ent, degen = post_bbm_entanglement(xi, eta, p, q)
            state = post_bbm_state(xi, eta, p, q) if (with_states and not degen) else None
            out.append(BBMOutcome(p, q, pr, state, ent, degen))
    return out


def _bounds(xi, eta, outcomes, avg, tol) -> BoundReport:
    d = xi.d
    e_xi, e_eta = xi.entanglement(), eta.entanglement()
    product = e_xi * e_eta
    conj = product / (d - 1)
    per_outcome = tuple(
        None if (o.degenerate or product == 0.0) else product / (o.probability * d) for o in outcomes
    )
    flags = {
        "avg_le_eta": avg <= e_eta + tol,
        "avg_le_xi": avg <= e_xi + tol,
        "avg_le_product": avg <= product + tol,
        "per_outcome_le_bound": all(
            b is None or o.entanglement <= b + tol for o, b in zip(outcomes, per_outcome)
        ),
        "avg_le_conjecture": avg <= conj + tol,
    }
    return BoundReport(
        d=d,
        avg_entanglement=avg,
        bound_xi=e_xi,
        bound_eta=e_eta,
        bound_product=product,
        bound_conjecture=conj,
        per_outcome_bounds=per_outcome,
        flags=flags,
        conjecture_status=CONFIRMED if flags["avg_le_conjecture"] else VIOLATED,
        tol=tol,
    )


def evaluate_bounds(xi: SchmidtCoeffs, eta: SchmidtCoeffs, tol: float = BOUND_TOL) -> BoundReport:
    return _bounds(xi, eta, _outcomes(xi, eta, with_states=False), average_entanglement(xi, eta), tol)


@dataclass(frozen=True, eq=False)
class SwapReport:
    d: int
    input_xi: SchmidtCoeffs
    input_eta: SchmidtCoeffs
    initial_ccr_xi: CCRBreakdown
    initial_ccr_eta: CCRBreakdown
    outcomes: tuple[BBMOutcome, ...]
    bounds: BoundReport

    def outcome(self, p: int, q: int) -> BBMOutcome:
        return self.outcomes[p * self.d + q]

    @property
    def total_probability(self) -> float:
        return float(sum(o.probability for o in self.outcomes))

    def per_p(self) -> list[dict]:
        """One row per ``p``: single-outcome probability, its sum over ``q``, entanglement."""
        rows = []
        for p in range(self.d):
            o = self.outcome(p, 0)
            rows.append({
                "p": p,
                "probability": o.probability,
                "probability_sum_q": float(sum(self.outcome(p, q).probability for q in range(self.d))),
                "entanglement": o.entanglement,
                "degenerate": o.degenerate,
            })
        return rows

    def as_dict(self) -> dict:
        def coeffs(c):
            return [[z.real, z.imag] for z in c.coeffs.tolist()]

        return {
            "d": self.d,
            "input_xi": coeffs(self.input_xi),
            "input_eta": coeffs(self.input_eta),
            "initial_ccr_xi": self.initial_ccr_xi.as_dict(),
            "initial_ccr_eta": self.initial_ccr_eta.as_dict(),
            "outcomes": [o.as_dict() for o in self.outcomes],
            "per_p": self.per_p(),
            "bounds": self.bounds.as_dict(),
        }


def run_protocol(xi: SchmidtCoeffs, eta: SchmidtCoeffs, tol: float = BOUND_TOL) -> SwapReport:
    d = _check_pair(xi, eta)
    outcomes = tuple(_outcomes(xi, eta))
    avg = average_entanglement(xi, eta)
    return SwapReport(
        d=d,
        input_xi=xi,
        input_eta=eta,
        initial_ccr_xi=ccr_check(xi.pair_state(), 0),
        initial_ccr_eta=ccr_check(eta.pair_state(), 1),
        outcomes=outcomes,
        bounds=_bounds(xi, eta, outcomes, avg, tol),
    )


@dataclass(frozen=True, eq=False)
class QubitScan:
    """Qubit-pair quantities on an ``x`` by ``y`` grid, arrays indexed ``[ix, iy]``.

    ``pr_p0``/``pr_p1`` are single-outcome probabilities (any fixed ``q``);
    the ``*_sum_q`` arrays add both ``q`` values. Degenerate outcomes carry
    entanglement 0 and a set mask entry.
    """

    x: np.ndarray
    y: np.ndarray
    pr_p0: np.ndarray
    pr_p1: np.ndarray
    ent_p0: np.ndarray
    ent_p1: np.ndarray
    degenerate_p0: np.ndarray
    degenerate_p1: np.ndarray

    @property
    def pr_p0_sum_q(self) -> np.ndarray:
        return 2.0 * self.pr_p0

    @property
    def pr_p1_sum_q(self) -> np.ndarray:
        return 2.0 * self.pr_p1

    def rows(self):
        for i, xv in enumerate(self.x):
            for j, yv in enumerate(self.y):
                yield {
                    "x": float(xv),
                    "y": float(yv),
                    "pr_p0": float(self.pr_p0[i, j]),
                    "pr_p1": float(self.pr_p1[i, j]),
                    "ent_p0": float(self.ent_p0[i, j]),
                    "ent_p1": float(self.ent_p1[i, j]),
                    "pr_p0_sum_q": float(self.pr_p0_sum_q[i, j]),
                    "pr_p1_sum_q": float(self.pr_p1_sum_q[i, j]),
                    "degenerate_p0": bool(self.degenerate_p0[i, j]),
                    "degenerate_p1": bool(self.degenerate_p1[i, j]),
                }


def batch_swap(cmod: np.ndarray, dmod: np.ndarray) -> dict[str, np.ndarray]:
    """Closed-form quantities for many pairs at once (rows of moduli).

    Keys: ``prob`` and ``ent`` (``(n, d)``, per ``p``), ``degenerate``,
    ``average``, ``e_xi``, ``e_eta``.
    """
    cmod = np.atleast_2d(np.asarray(cmod, dtype=np.float64))
    dmod = np.atleast_2d(np.asarray(dmod, dtype=np.float64))
    d = cmod.shape[1]
    prob, wsum = _kernels.swap_tables(cmod, dmod)
    degenerate = prob <= DEGENERATE_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = np.where(degenerate, 0.0, wsum / (prob * d))
    return {
        "prob": prob,
        "ent": ent,
        "degenerate": degenerate,
        "average": wsum.sum(axis=1),
        "e_xi": _kernels.pair_entanglement(cmod),
        "e_eta": _kernels.pair_entanglement(dmod),
    }


def qubit_scan(x_grid: Sequence[float], y_grid: Sequence[float]) -> QubitScan:
    x = np.asarray(x_grid, dtype=np.float64).ravel()
    y = np.asarray(y_grid, dtype=np.float64).ravel()
    for name, g in (("x", x), ("y", y)):
        if g.size == 0 or np.any((g < 0.0) | (g > 1.0)) or not np.all(np.isfinite(g)):
            raise StateError(f"{name} grid must be nonempty with values in [0, 1]")
    xx, yy = np.meshgrid(x, y, indexing="ij")
    cmod = np.stack([np.sqrt(xx.ravel()), np.sqrt(1.0 - xx.ravel())], axis=1)
    dmod = np.stack([np.sqrt(yy.ravel()), np.sqrt(1.0 - yy.ravel())], axis=1)
    b = batch_swap(cmod, dmod)
    shape = xx.shape
    return QubitScan(
        x=x,
        y=y,
        pr_p0=b["prob"][:, 0].reshape(shape),
        pr_p1=b["prob"][:, 1].reshape(shape),
        ent_p0=b["ent"][:, 0].reshape(shape),
        ent_p1=b["ent"][:, 1].reshape(shape),
        degenerate_p0=b["degenerate"][:, 0].reshape(shape),
        degenerate_p1=b["degenerate"][:, 1].reshape(shape),
    )
