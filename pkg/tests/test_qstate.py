import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from envstat.envariance import swap_unitary
from envstat.qstate import (
    DensityMatrix,
    PureState,
    UnitaryOp,
    ValidationError,
    apply_local,
    bell_state,
    fidelity,
    internal_mutual_information,
    mutual_information,
    partial_trace,
    random_haar_unitary,
    random_state,
    schmidt,
    state_from_schmidt,
    von_neumann_entropy,
)

dims = st.integers(min_value=1, max_value=6)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_non_normalized_state_rejected():
    with pytest.raises(ValidationError):
        PureState(2, 2, np.array([1, 1, 0, 0], dtype=complex))


def test_index_convention():
    psi = PureState.from_amplitudes(2, 3, np.arange(6) + 1.0)
    assert psi.matrix[1, 2] == psi.amplitudes[1 * 3 + 2]


def test_schmidt_bell():
    dec = schmidt(bell_state())
    assert dec.rank == 2
    np.testing.assert_allclose(dec.coefficients, [2**-0.5] * 2, atol=1e-14)


def test_schmidt_product():
    dec = schmidt(PureState.from_amplitudes(2, 2, [1, 0, 0, 0]))
    assert dec.rank == 1
    np.testing.assert_allclose(dec.coefficients, [1.0])


def test_schmidt_random_3x3_matches_reduced_spectrum():
    psi = random_state(3, 3, seed=7)
    m = psi.amplitudes.reshape(3, 3)
    # independent oracle: eigenvalues of M M^dag from scratch
    oracle = np.sort(np.linalg.eigvalsh(m @ m.conj().T))[::-1]
    np.testing.assert_allclose(schmidt(psi).coefficients ** 2, oracle, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(dims, dims, seeds)
def test_schmidt_invariants(ds, de, seed):
    psi = random_state(ds, de, seed)
    dec = schmidt(psi)
    assert abs(np.sum(dec.coefficients**2) - 1) <= 1e-10
    r = dec.rank
    assert np.max(np.abs(dec.basis_s.conj().T @ dec.basis_s - np.eye(r))) <= 1e-10
    assert np.max(np.abs(dec.basis_e.conj().T @ dec.basis_e - np.eye(r))) <= 1e-10
    assert fidelity(dec.reconstruct(), psi) >= 1 - 1e-10
    ev = np.sort(partial_trace(psi, "S").eigenvalues())[::-1][:r]
    np.testing.assert_allclose(np.sort(dec.coefficients**2)[::-1], ev, atol=1e-10)
    assert np.all(np.diff(dec.coefficients) <= 0)


def test_partial_trace_examples():
    np.testing.assert_allclose(partial_trace(bell_state(), "S").entries, np.eye(2) / 2, atol=1e-15)
    prod = PureState.from_amplitudes(2, 2, [1, 0, 0, 0])
    np.testing.assert_allclose(partial_trace(prod, "S").entries, np.diag([1, 0]))
    even4 = state_from_schmidt(np.full(4, 0.5), dim_s=4, dim_e=5)
    np.testing.assert_allclose(partial_trace(even4, "S").entries, np.eye(4) / 4, atol=1e-15)


def test_partial_trace_environment_side():
    psi = PureState.from_amplitudes(2, 3, [1, 0, 0, 0, 1, 0])
    rho_e = partial_trace(psi, "E")
    assert rho_e.dim == 3
    np.testing.assert_allclose(rho_e.entries, np.diag([0.5, 0.5, 0.0]), atol=1e-15)
    with pytest.raises(ValueError):
        partial_trace(psi, "X")


def test_apply_local_swap_on_bell():
    out = apply_local(bell_state(), swap_unitary(), "S")
    expected = PureState.from_amplitudes(2, 2, [0, 1, 1, 0])
    assert fidelity(out, expected) == pytest.approx(1.0, abs=1e-15)


def test_apply_local_identity_and_inverse():
    psi = random_state(3, 4, seed=1)
    assert fidelity(apply_local(psi, UnitaryOp.identity(3), "S"), psi) == pytest.approx(1, abs=1e-14)
    u = random_haar_unitary(4, seed=2)
    back = apply_local(apply_local(psi, u, "E"), u.dagger, "E")
    assert fidelity(back, psi) >= 1 - 1e-12


def test_apply_local_dimension_mismatch():
    with pytest.raises(ValidationError):
        apply_local(bell_state(), UnitaryOp.identity(3), "S")


@settings(max_examples=40, deadline=None)
@given(dims, dims, seeds)
def test_local_environment_unitary_leaves_rho_s(ds, de, seed):
    psi = random_state(ds, de, seed)
    u = random_haar_unitary(de, seed + 1)
    a = partial_trace(apply_local(psi, u, "E"), "S").entries
    b = partial_trace(psi, "S").entries
    assert np.max(np.abs(a - b)) <= 1e-10


def test_entropy_examples():
    assert von_neumann_entropy(DensityMatrix(2, np.eye(2) / 2)) == pytest.approx(math.log(2), abs=1e-15)
    assert von_neumann_entropy(DensityMatrix(2, np.diag([1.0, 0.0]))) == 0.0
    oracle = -0.7 * math.log(0.7) - 0.3 * math.log(0.3)
    assert oracle == pytest.approx(0.6109, abs=1e-4)
    assert von_neumann_entropy(DensityMatrix(2, np.diag([0.7, 0.3]))) == pytest.approx(oracle, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(dims, dims, seeds)
def test_entropy_bounds(ds, de, seed):
    rho = partial_trace(random_state(ds, de, seed), "S")
    s = von_neumann_entropy(rho)
    assert 0 <= s <= math.log(ds) + 1e-15


def test_mutual_information_examples():
    assert mutual_information(PureState.from_amplitudes(2, 2, [1, 0, 0, 0])) == 0.0
    assert mutual_information(bell_state()) == pytest.approx(2 * math.log(2), abs=1e-14)
    for z in (1, 3, 5):
        psi = state_from_schmidt(np.full(z, z**-0.5), dim_s=z + 1, dim_e=z + 2)
        assert mutual_information(psi) == pytest.approx(2 * math.log(z), abs=1e-12)


def test_internal_mutual_information_reduces_to_pure_case():
    # dim_e = 1: the system itself is pure, so A:B information is 2 S(rho_A)
    psi = PureState.from_amplitudes(4, 1, [1, 0, 0, 1])
    assert internal_mutual_information(psi, 2, 2) == pytest.approx(2 * math.log(2), abs=1e-14)
    with pytest.raises(ValidationError):
        internal_mutual_information(psi, 3, 2)


def test_haar_examples():
    u1 = random_haar_unitary(1, seed=3)
    assert abs(abs(u1.entries[0, 0]) - 1) <= 1e-15
    np.testing.assert_array_equal(random_haar_unitary(5, 11).entries, random_haar_unitary(5, 11).entries)
    u4 = random_haar_unitary(4, seed=0).entries
    assert np.max(np.abs(u4.conj().T @ u4 - np.eye(4))) <= 1e-10


def test_haar_first_moment():
    # E|U_00|^2 = 1/d under Haar measure
    d = 3
    vals = [abs(random_haar_unitary(d, s).entries[0, 0]) ** 2 for s in range(4000)]
    assert np.mean(vals) == pytest.approx(1 / d, abs=0.02)


def test_unitary_validation():
    with pytest.raises(ValidationError):
        UnitaryOp(2, np.array([[1, 1], [0, 1]]))


def test_density_matrix_validation():
    with pytest.raises(ValidationError):
        DensityMatrix(2, np.diag([0.7, 0.7]))
    with pytest.raises(ValidationError):
        DensityMatrix(2, np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(ValidationError):
        DensityMatrix(2, np.diag([1.5, -0.5]))


def test_state_json_round_trip():
    psi = random_state(2, 3, seed=5)
    again = PureState.from_dict(json.loads(json.dumps(psi.to_dict())))
    assert fidelity(psi, again) == pytest.approx(1, abs=1e-15)
    with pytest.raises(ValidationError):
        PureState.from_dict({**psi.to_dict(), "extra": 1})
    with pytest.raises(ValidationError):
        PureState.from_dict({"dimS": 1, "dimE": 2, "re": [1, 1], "im": [0, 0]})


def test_state_json_tolerates_twelve_digit_rounding():
    psi = random_state(3, 3, seed=9)
    d = psi.to_dict()
    d["re"] = [float(f"{x:.12g}") for x in d["re"]]
    d["im"] = [float(f"{x:.12g}") for x in d["im"]]
    assert fidelity(PureState.from_dict(d), psi) >= 1 - 1e-20 - 1e-11
