import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_coeffs
from qudit_swap.conjecture import (
    NotApplicableError,
    ScanConfig,
    per_index_inequality_check,
    periodic_coeffs,
    ratio,
    sample_coeffs,
    sample_rng,
    scan,
    structured_family,
)
from qudit_swap.protocol import CONFIRMED, VIOLATED, SchmidtCoeffs, average_entanglement, uniform_coeffs
from qudit_swap.tensor_core import StateError

S2 = 1 / np.sqrt(2)
PERIODIC4 = (S2, 0, S2, 0)


def test_sample_uniform_simplex_qubit_is_flat():
    u = np.array([sample_coeffs(2, sample_rng(3, i)).moduli[0] ** 2 for i in range(4000)])
    assert abs(u.mean() - 0.5) < 0.02
    assert abs(u.var() - 1 / 12) < 0.01
    assert np.all(u >= 0) and np.all(u <= 1)


def test_sample_sparse_support():
    for i in range(50):
        c = sample_coeffs(6, sample_rng(0, i), "sparse-support", k=3)
        assert np.count_nonzero(c.moduli) == 3
    c = sample_coeffs(4, sample_rng(0, 0), "sparse-support", k=1)
    assert sorted(c.moduli.tolist()) == [0, 0, 0, 1]


def test_sample_rejects_bad_args():
    with pytest.raises(StateError):
        sample_coeffs(3, sample_rng(0, 0), "sparse-support", k=4)
    with pytest.raises(StateError):
        sample_coeffs(3, sample_rng(0, 0), "structured-periodic")
    with pytest.raises(StateError):
        sample_coeffs(3, sample_rng(0, 0), "gaussian")


def test_periodic_family():
    np.testing.assert_allclose(periodic_coeffs(4, 2).moduli, PERIODIC4, atol=1e-15)
    np.testing.assert_allclose(periodic_coeffs(4, 4).moduli, [1, 0, 0, 0])
    assert len(structured_family(6)) == 4
    with pytest.raises(StateError):
        periodic_coeffs(4, 3)


@pytest.mark.parametrize("kwargs", [
    {"d": 1},
    {"d": 3, "n_samples": 0},
    {"d": 3, "distribution": "sparse-support", "k": 1},
    {"d": 3, "distribution": "sparse-support"},
    {"d": 3, "distribution": "other"},
    {"d": 3, "seed": -1},
])
def test_config_validation(kwargs):
    with pytest.raises(StateError):
        ScanConfig(**kwargs)


@pytest.mark.parametrize("d", [2, 3])
def test_ratio_exact_for_small_dims(rng, d):
    for _ in range(200):
        assert ratio(random_coeffs(rng, d), random_coeffs(rng, d)) == pytest.approx(1.0, abs=1e-12)


def test_ratio_periodic_d4():
    c = SchmidtCoeffs(PERIODIC4)
    assert ratio(c, c) == pytest.approx(3.0, abs=1e-12)


def test_ratio_uniform_is_one():
    for d in range(2, 8):
        assert ratio(uniform_coeffs(d), uniform_coeffs(d)) == pytest.approx(1.0, abs=1e-12)


def test_ratio_not_applicable():
    with pytest.raises(NotApplicableError):
        ratio(SchmidtCoeffs([1, 0, 0]), uniform_coeffs(3))


@pytest.mark.parametrize("d", [2, 3])
def test_scan_small_dims_saturate(d):
    r = scan(ScanConfig(d=d, n_samples=10_000, seed=1))
    assert r.n_evaluated == r.n_applicable == 10_000
    assert r.violations == []
    assert r.saturation_count == 10_000
    assert abs(r.max_ratio - 1) <= 1e-12
    assert r.status == CONFIRMED
    assert r.proven_bounds_hold


def test_scan_d4_structured_violation():
    r = scan(ScanConfig(d=4, n_samples=10, seed=0, structured=True))
    assert r.status == VIOLATED
    hits = [v for v in r.violations if np.allclose(v.xi.moduli, PERIODIC4) and np.allclose(v.eta.moduli, PERIODIC4)]
    assert len(hits) == 1
    assert hits[0].ratio == pytest.approx(3.0, abs=1e-9)
    assert hits[0].oracle_deviation < 1e-9 and not hits[0].numerical_suspect
    assert r.max_ratio == pytest.approx(3.0, abs=1e-9)
    assert r.proven_bounds_hold


def test_scan_structured_only():
    r = scan(ScanConfig(d=4, distribution="structured-periodic"))
    assert r.n_evaluated == len(structured_family(4)) ** 2


def test_scan_violations_exceed_tolerance():
    r = scan(ScanConfig(d=5, n_samples=300, seed=4))
    assert all(v.ratio > 1 + r.config.tol for v in r.violations)
    assert all(v.oracle_deviation < 1e-9 for v in r.violations)
    assert r.max_ratio >= 0
    assert r.proven_bounds_hold


def test_scan_uniform_d4_also_violates():
    # not only the sparse family: full-support samples break the bound as well
    r = scan(ScanConfig(d=4, n_samples=200, seed=0, structured=False, verify_violations=False))
    assert r.violations
    assert all(np.all(v.xi.moduli > 0) for v in r.violations)


def test_scan_sparse_support_runs():
    r = scan(ScanConfig(d=5, n_samples=200, seed=2, distribution="sparse-support", k=2, structured=False))
    assert r.n_evaluated == 200
    assert r.proven_bounds_hold


def test_scan_deterministic():
    cfg = ScanConfig(d=4, n_samples=500, seed=99)
    a, b = scan(cfg), scan(cfg)
    assert a.max_ratio == b.max_ratio
    assert [v.ratio for v in a.violations] == [v.ratio for v in b.violations]
    assert a.saturation_count == b.saturation_count


def test_scan_sample_streams_are_order_free():
    from qudit_swap.conjecture import _candidates

    long_xi, long_eta, _ = _candidates(ScanConfig(d=3, n_samples=5, seed=8))
    short_xi, short_eta, _ = _candidates(ScanConfig(d=3, n_samples=3, seed=8))
    for a, b in zip(short_xi + short_eta, long_xi[:3] + long_eta[:3]):
        np.testing.assert_array_equal(a.moduli, b.moduli)


def test_scan_as_dict():
    doc = scan(ScanConfig(d=4, n_samples=5)).as_dict()
    assert doc["status"] == VIOLATED
    assert doc["config"]["structured"] is True
    assert doc["n_violations"] == len(doc["violations"])


def test_per_index_qutrit_uniform():
    t = per_index_inequality_check(uniform_coeffs(3))
    assert t.rhs == pytest.approx(1.0, abs=1e-14)
    for lhs in t.by_delta.values():
        assert lhs == pytest.approx(1.0, abs=1e-14)
    assert t.flagged_deltas == ()


def test_per_index_qubit_equality(rng):
    for _ in range(20):
        c = random_coeffs(rng, 2)
        t = per_index_inequality_check(c)
        assert t.by_delta[1] == pytest.approx(t.rhs, abs=1e-14)
        assert t.flagged_deltas == ()


def test_per_index_periodic_d4():
    t = per_index_inequality_check(SchmidtCoeffs(PERIODIC4))
    assert t.by_delta[2] == pytest.approx(1.0, abs=1e-14)
    assert t.rhs == pytest.approx(1 / 3, abs=1e-14)
    assert 2 in t.flagged_deltas
    assert t.by_delta[1] == 0 and t.by_delta[3] == 0


def test_per_index_rows_depend_only_on_delta(rng):
    t = per_index_inequality_check(random_coeffs(rng, 5))
    assert len(t.rows) == 20
    for j, k, delta, lhs, rhs, flagged in t.rows:
        assert delta == (k - j) % 5
        assert lhs == pytest.approx(t.by_delta[delta], abs=1e-14)
        assert flagged == (lhs > rhs + 1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_ratio_below_per_index_maximum(d, seed):
    rng = np.random.default_rng(seed)
    xi, eta = sample_coeffs(d, rng), sample_coeffs(d, rng)
    t = per_index_inequality_check(xi)
    bound = max(lhs / t.rhs for lhs in t.by_delta.values())
    assert ratio(xi, eta) <= bound + 1e-9


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_proven_bounds_on_any_input(d, seed):
    rng = np.random.default_rng(seed)
    xi, eta = sample_coeffs(d, rng), sample_coeffs(d, rng)
    avg = average_entanglement(xi, eta)
    e_xi, e_eta = xi.entanglement(), eta.entanglement()
    assert avg <= min(e_xi, e_eta) + 1e-9
    assert avg <= e_xi * e_eta + 1e-9
