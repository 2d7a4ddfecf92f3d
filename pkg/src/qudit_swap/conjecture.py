"""Search for counterexamples to the bound ``<E> <= E_xi E_eta / (d - 1)``.

The bound is exact for qubits and qutrits and for maximally entangled pairs.
It is treated here as a hypothesis: scans report the largest ratio
``<E> (d - 1) / (E_xi E_eta)`` seen, and every ratio above ``1 + tol`` is
re-checked by brute-force simulation before it is reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .oracle import compare
from .protocol import BOUND_TOL, CONFIRMED, VIOLATED, SchmidtCoeffs, average_entanglement, batch_swap
from .tensor_core import StateError

DISTRIBUTIONS = ("uniform-simplex", "sparse-support", "structured-periodic")
APPLICABLE_TOL = 1e-12
ORACLE_TOL = 1e-9


class NotApplicableError(ValueError):
    """The ratio is undefined because one of the pairs is (nearly) unentangled."""


@dataclass(frozen=True)
class ScanConfig:
    d: int
    n_samples: int = 1000
    seed: int = 0
    distribution: str = "uniform-simplex"
    k: int | None = None
    tol: float = BOUND_TOL
    structured: bool | None = None
    verify_violations: bool = True

    def __post_init__(self):
        if self.d < 2:
            raise StateError(f"d must be >= 2, got {self.d}")
        if self.n_samples < 1:
            raise StateError("n_samples must be >= 1")
        if self.distribution not in DISTRIBUTIONS:
            raise StateError(f"unknown distribution {self.distribution!r}; choose from {DISTRIBUTIONS}")
        if self.distribution == "sparse-support":
            if self.k is None or not 2 <= self.k <= self.d:
                raise StateError(f"sparse-support needs 2 <= k <= d, got k={self.k}")
        if not 0 <= self.seed < 2**64:
            raise StateError("seed must fit in 64 unsigned bits")

    @property
    def include_structured(self) -> bool:
        if self.structured is None:
            return self.d >= 4
        return self.structured

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "distribution": self.distribution,
            "k": self.k,
            "tol": self.tol,
            "structured": self.include_structured,
            "verify_violations": self.verify_violations,
        }


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for sample ``index``; order of evaluation cannot matter."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _flat_simplex_sqrt(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.sqrt(rng.dirichlet(np.ones(size)))


def sample_coeffs(d: int, rng: np.random.Generator, distribution: str = "uniform-simplex",
                  k: int | None = None) -> SchmidtCoeffs:
    """Nonnegative coefficients whose squares are drawn from a flat simplex.

    ``sparse-support`` first picks a uniformly random ``k``-subset of positions.
    ``k=1`` yields a basis vector.
    """
    if distribution == "uniform-simplex":
        return SchmidtCoeffs.from_values(_flat_simplex_sqrt(rng, d), normalize=True)
    if distribution == "sparse-support":
        if k is None or not 1 <= k <= d:
            raise StateError(f"sparse-support needs 1 <= k <= d, got k={k}")
        c = np.zeros(d)
        c[rng.choice(d, size=k, replace=False)] = _flat_simplex_sqrt(rng, k)
        return SchmidtCoeffs.from_values(c, normalize=True)
    if distribution == "structured-periodic":
        raise StateError("structured-periodic is deterministic; use structured_family()")
    raise StateError(f"unknown distribution {distribution!r}")


def periodic_coeffs(d: int, stride: int) -> SchmidtCoeffs:
    """Equal weight on positions ``0, stride, 2*stride, ...``."""
    if stride < 1 or d % stride:
        raise StateError(f"stride {stride} does not divide d={d}")
    c = np.zeros(d)
    c[::stride] = 1.0 / np.sqrt(d // stride)
    return SchmidtCoeffs(c)


def structured_family(d: int) -> list[SchmidtCoeffs]:
    """One periodic vector per divisor stride of ``d`` (stride 1 is the uniform vector)."""
    return [periodic_coeffs(d, s) for s in range(1, d + 1) if d % s == 0]


def ratio(xi: SchmidtCoeffs, eta: SchmidtCoeffs) -> float:
    """``<E> (d - 1) / (E_xi E_eta)``; the conjectured bound holds iff this is <= 1."""
    product = xi.entanglement() * eta.entanglement()
    if product <= APPLICABLE_TOL:
        raise NotApplicableError(f"product of initial entanglements is {product:.3e}")
    return average_entanglement(xi, eta) * (xi.d - 1) / product


@dataclass(frozen=True, eq=False)
class Violation:
    xi: SchmidtCoeffs
    eta: SchmidtCoeffs
    ratio: float
    source: str
    oracle_deviation: float | None = None
    numerical_suspect: bool = False

    def as_dict(self) -> dict:
        return {
            "xi": self.xi.moduli.tolist(),
            "eta": self.eta.moduli.tolist(),
            "ratio": self.ratio,
            "source": self.source,
            "oracle_deviation": self.oracle_deviation,
            "numerical_suspect": self.numerical_suspect,
        }


@dataclass(frozen=True, eq=False)
class ScanResult:
    config: ScanConfig
    n_evaluated: int
    n_applicable: int
    max_ratio: float
    argmax: tuple[SchmidtCoeffs, SchmidtCoeffs] | None
    violations: list[Violation]
    saturation_count: int
    proven_bound_failures: int
    backend: str = field(default="", compare=False)

    @property
    def status(self) -> str:
        return VIOLATED if self.violations else CONFIRMED

    @property
    def proven_bounds_hold(self) -> bool:
        return self.proven_bound_failures == 0

    def as_dict(self) -> dict:
        return {
            "config": self.config.as_dict(),
            "status": self.status,
            "n_evaluated": self.n_evaluated,
            "n_applicable": self.n_applicable,
            "max_ratio": self.max_ratio,
            "argmax": None if self.argmax is None else {
                "xi": self.argmax[0].moduli.tolist(), "eta": self.argmax[1].moduli.tolist()},
            "saturation_count": self.saturation_count,
            "n_violations": len(self.violations),
            "violations": [v.as_dict() for v in self.violations],
            "proven_bounds_hold": self.proven_bounds_hold,
            "proven_bound_failures": self.proven_bound_failures,
            "backend": self.backend,
        }


def _candidates(config: ScanConfig) -> tuple[list[SchmidtCoeffs], list[SchmidtCoeffs], list[str]]:
    xis, etas, sources = [], [], []
    if config.distribution != "structured-periodic":
        for i in range(config.n_samples):
            rng = sample_rng(config.seed, i)
            xis.append(sample_coeffs(config.d, rng, config.distribution, config.k))
            etas.append(sample_coeffs(config.d, rng, config.distribution, config.k))
            sources.append(f"{config.distribution}[{i}]")
    if config.distribution == "structured-periodic" or config.include_structured:
        family = structured_family(config.d)
        for a in family:
            for b in family:
                xis.append(a)
                etas.append(b)
                sources.append("structured-periodic")
    return xis, etas, sources


def scan(config: ScanConfig) -> ScanResult:
    from . import _kernels

    xis, etas, sources = _candidates(config)
    cmod = np.stack([c.moduli for c in xis])
    dmod = np.stack([c.moduli for c in etas])
    b = batch_swap(cmod, dmod)
    avg, e_xi, e_eta = b["average"], b["e_xi"], b["e_eta"]
    product = e_xi * e_eta
    tol = config.tol

    failures = (avg > np.minimum(e_xi, e_eta) + tol) | (avg > product + tol)

    applicable = product > APPLICABLE_TOL
    ratios = np.full(len(xis), np.nan)
    ratios[applicable] = avg[applicable] * (config.d - 1) / product[applicable]

    argmax = None
    max_ratio = 0.0
    if applicable.any():
        i_max = int(np.nanargmax(ratios))
        max_ratio = float(ratios[i_max])
        argmax = (xis[i_max], etas[i_max])

    violations = []
    for i in np.flatnonzero(applicable & (ratios > 1.0 + tol)):
        dev = None
        if config.verify_violations:
            dev = compare(xis[i], etas[i])
        violations.append(Violation(
            xis[i], etas[i], float(ratios[i]), sources[i],
            oracle_deviation=dev, numerical_suspect=dev is not None and not dev < ORACLE_TOL,
        ))

    return ScanResult(
        config=config,
        n_evaluated=len(xis),
        n_applicable=int(applicable.sum()),
        max_ratio=max_ratio,
        argmax=argmax,
        violations=violations,
        saturation_count=int(np.sum(applicable & (np.abs(ratios - 1.0) <= tol))),
        proven_bound_failures=int(failures.sum()),
        backend=_kernels.backend_name(),
    )


@dataclass(frozen=True)
class PerIndexTable:
    """Per-pair inequality ``sum_p |c_{p+j} c_{p+k}| <= sum_{l != m} |c_l c_m| / (d - 1)``.

    The left side depends only on ``delta = (k - j) mod d``.
    """

    d: int
    rows: tuple  # (j, k, delta, lhs, rhs, violated)
    by_delta: dict
    rhs: float
    flagged_deltas: tuple

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "rhs": self.rhs,
            "by_delta": {str(k): v for k, v in self.by_delta.items()},
            "flagged_deltas": list(self.flagged_deltas),
            "rows": [list(r) for r in self.rows],
        }


def per_index_inequality_check(c: SchmidtCoeffs, tol: float = BOUND_TOL) -> PerIndexTable:
    d = c.d
    a = c.moduli
    rhs = c.entanglement() / (d - 1)
    by_delta = {delta: float(np.sum(a * np.roll(a, -delta))) for delta in range(1, d)}
    rows = []
    for j in range(d):
        for k in range(d):
            if j == k:
                continue
            lhs = float(sum(a[(p + j) % d] * a[(p + k) % d] for p in range(d)))
            rows.append((j, k, (k - j) % d, lhs, rhs, lhs > rhs + tol))
    flagged = tuple(delta for delta, lhs in by_delta.items() if lhs > rhs + tol)
    return PerIndexTable(d=d, rows=tuple(rows), by_delta=by_delta, rhs=rhs, flagged_deltas=flagged)
