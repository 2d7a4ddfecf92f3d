import numpy as np
import pytest

from qudit_swap.ccr import entanglement_l1
from qudit_swap.gates import (
    bell_basis,
    bell_gram,
    bell_state,
    bell_state_via_circuit,
    controlled_shift,
    fourier,
    is_unitary,
    shift,
)
from qudit_swap.tensor_core import StateError, apply_unitary, basis_state, partial_trace

S2 = 1 / np.sqrt(2)


def test_fourier_qubit_is_hadamard():
    np.testing.assert_allclose(fourier(2), np.array([[1, 1], [1, -1]]) * S2, atol=1e-15)


def test_fourier_columns_equimodular():
    f = fourier(3)
    for k in range(3):
        col = f @ basis_state([k], 3).amps
        np.testing.assert_allclose(np.abs(col), 1 / np.sqrt(3), atol=1e-15)


def test_fourier_entries():
    d = 5
    f = fourier(d)
    for j in range(d):
        for k in range(d):
            assert abs(f[j, k] - np.exp(2j * np.pi * j * k / d) / np.sqrt(d)) < 1e-14


@pytest.mark.parametrize("d", range(2, 9))
def test_fourier_fourth_power_identity(d):
    f = fourier(d)
    f2 = f @ f
    j = np.arange(d)
    reversal = np.zeros((d, d))
    reversal[(-j) % d, j] = 1
    np.testing.assert_allclose(f2, reversal, atol=1e-10)
    np.testing.assert_allclose(f2 @ f2, np.eye(d), atol=1e-10)


def test_fourier_rejects_small_dim():
    with pytest.raises(StateError):
        fourier(1)


def test_shift_action():
    out = shift(3, 1) @ basis_state([2], 3).amps
    np.testing.assert_array_equal(out, basis_state([0], 3).amps)


@pytest.mark.parametrize("d", [2, 3, 7])
def test_shift_zero_is_identity(d):
    np.testing.assert_array_equal(shift(d, 0), np.eye(d))


def test_shift_group_law():
    np.testing.assert_array_equal(shift(5, 2) @ shift(5, 4), shift(5, 1))
    for j in range(4):
        for k in range(4):
            np.testing.assert_array_equal(shift(4, j) @ shift(4, k), shift(4, (j + k) % 4))


@pytest.mark.parametrize("j", [-1, 3])
def test_shift_out_of_range(j):
    with pytest.raises(StateError):
        shift(3, j)


def test_cnot_qubit():
    u = controlled_shift(2, 0, 1)
    np.testing.assert_array_equal(u @ basis_state([1, 0], 2).amps, basis_state([1, 1], 2).amps)


def test_cnot_qutrit_wraps():
    u = controlled_shift(3, 0, 1)
    np.testing.assert_array_equal(u @ basis_state([1, 2], 3).amps, basis_state([1, 0], 3).amps)


def test_cnot_reversed_wiring():
    u = controlled_shift(3, 1, 0)
    for j in range(3):
        for k in range(3):
            out = u @ basis_state([j, k], 3).amps
            np.testing.assert_array_equal(out, basis_state([(j + k) % 3, k], 3).amps)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("wiring", [(0, 1), (1, 0)])
def test_cnot_is_permutation(d, wiring):
    u = controlled_shift(d, *wiring)
    assert set(np.unique(u)) <= {0, 1}
    assert np.all(u.sum(axis=0) == 1) and np.all(u.sum(axis=1) == 1)


def test_cnot_slot_collision():
    with pytest.raises(StateError):
        controlled_shift(3, 0, 0)


@pytest.mark.parametrize("d", range(2, 7))
def test_all_gates_unitary(d):
    assert is_unitary(fourier(d))
    for j in range(d):
        assert is_unitary(shift(d, j))
    assert is_unitary(controlled_shift(d, 0, 1))
    assert is_unitary(controlled_shift(d, 1, 0))


def test_qubit_bell_basis_matches_standard():
    phi_p = np.array([1, 0, 0, 1]) * S2
    phi_m = np.array([1, 0, 0, -1]) * S2
    psi_p = np.array([0, 1, 1, 0]) * S2
    psi_m = np.array([0, 1, -1, 0]) * S2
    np.testing.assert_allclose(bell_state(2, 0, 0).amps, phi_p, atol=1e-15)
    np.testing.assert_allclose(bell_state(2, 0, 1).amps, phi_m, atol=1e-15)
    np.testing.assert_allclose(bell_state(2, 1, 0).amps, psi_p, atol=1e-15)
    np.testing.assert_allclose(bell_state(2, 1, 1).amps, -psi_m, atol=1e-15)


def test_bell_d3_uniform_phase():
    np.testing.assert_allclose(
        bell_state(3, 0, 0).amps, np.array([1, 0, 0, 0, 1, 0, 0, 0, 1]) / np.sqrt(3), atol=1e-15
    )


def test_bell_d3_p1_q1_term_by_term():
    w = np.exp(2j * np.pi / 3)
    expected = np.zeros(9, dtype=complex)
    expected[1 * 3 + 0] = 1
    expected[2 * 3 + 1] = w
    expected[0 * 3 + 2] = w**2
    np.testing.assert_allclose(bell_state(3, 1, 1).amps, expected / np.sqrt(3), atol=1e-15)


def test_circuit_qubit_phi_plus():
    h = np.array([[1, 1], [1, -1]]) * S2
    cnot_b_to_a = controlled_shift(2, 1, 0)
    out = apply_unitary(basis_state([0, 0], 2), cnot_b_to_a @ np.kron(np.eye(2), h))
    np.testing.assert_allclose(out.amps, np.array([1, 0, 0, 1]) * S2, atol=1e-15)
    np.testing.assert_allclose(bell_state_via_circuit(2, 0, 0).amps, out.amps, atol=1e-15)


@pytest.mark.parametrize("d", range(2, 7))
def test_circuit_matches_closed_form(d):
    for p in range(d):
        for q in range(d):
            a = bell_state(d, p, q).amps
            b = bell_state_via_circuit(d, p, q).amps
            assert np.max(np.abs(a - b)) <= 1e-12


def test_circuit_d4_index_2_3():
    assert np.max(np.abs(bell_state(4, 2, 3).amps - bell_state_via_circuit(4, 2, 3).amps)) <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("via_circuit", [False, True])
def test_bell_gram_is_identity(d, via_circuit):
    assert len(bell_basis(d, via_circuit)) == d * d
    np.testing.assert_allclose(bell_gram(d, via_circuit), np.eye(d * d), atol=1e-12)


@pytest.mark.parametrize("d", range(2, 7))
def test_bell_resolution_of_identity(d):
    m = np.stack([s.amps for s in bell_basis(d)])
    np.testing.assert_allclose(m.T @ m.conj(), np.eye(d * d), atol=1e-10)


@pytest.mark.parametrize("d", range(2, 7))
def test_bell_marginals_maximally_mixed(d):
    for s in bell_basis(d):
        for side in (0, 1):
            np.testing.assert_allclose(partial_trace(s, [side]).matrix, np.eye(d) / d, atol=1e-12)
        assert entanglement_l1(s) == pytest.approx(d - 1, abs=1e-12)


def test_bell_index_out_of_range():
    with pytest.raises(StateError):
        bell_state(3, 3, 0)
    with pytest.raises(StateError):
        bell_state_via_circuit(3, 0, -1)


def test_qubit_bell_basis_exact():
    expected = {
        (0, 0): [S2, 0, 0, S2],
        (0, 1): [S2, 0, 0, -S2],
        (1, 0): [0, S2, S2, 0],
        (1, 1): [0, -S2, S2, 0],
    }
    for (p, q), amps in expected.items():
        np.testing.assert_array_equal(bell_state(2, p, q).amps, np.array(amps, dtype=complex))
