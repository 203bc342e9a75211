import numpy as np
import pytest

from envstat.envariance import (
    MARGINAL_NOT_PRESERVED,
    NotEnvariantError,
    construct_restoring,
    embed_on_subspace,
    equiprobability,
    is_envariant,
    is_maximally_envariant,
    marginal_mismatch,
    restoration_residual,
    schmidt_swap,
    swap_unitary,
)
from envstat.qstate import (
    PureState,
    UnitaryOp,
    ValidationError,
    apply_local,
    bell_state,
    fidelity,
    random_haar_unitary,
    random_state,
    reduced_matrix,
    schmidt,
    state_from_schmidt,
)


def uneven_state():
    return state_from_schmidt([np.sqrt(0.7), np.sqrt(0.3)])


def even_state(dim_s, dim_e, seed=0):
    """Even state with random local bases on both sides."""
    z = dim_s
    c = np.full(z, z**-0.5)
    bs = random_haar_unitary(dim_s, seed).entries
    be = random_haar_unitary(dim_e, seed + 10_000).entries[:, :z]
    return state_from_schmidt(c, bs, be)


def test_bell_swap_is_envariant_with_swap_witness():
    v = is_envariant(bell_state(), swap_unitary())
    assert v.envariant and v.reason == "constructed"
    assert v.residual <= 1e-9
    np.testing.assert_allclose(v.witness.entries, swap_unitary().entries, atol=1e-12)


def test_identity_is_envariant_with_identity_witness():
    psi = random_state(3, 4, seed=2)
    v = is_envariant(psi, UnitaryOp.identity(3))
    assert v.envariant
    np.testing.assert_allclose(v.witness.entries, np.eye(4), atol=1e-10)


def test_uneven_swap_not_envariant():
    psi = uneven_state()
    # direct oracle: the swapped marginal is diag(0.3, 0.7)
    rho = reduced_matrix(psi, "S")
    x = swap_unitary().entries
    assert np.max(np.abs(x @ rho @ x.T - rho)) == pytest.approx(0.4)
    v = is_envariant(psi, swap_unitary())
    assert not v.envariant
    assert v.reason == MARGINAL_NOT_PRESERVED
    assert v.witness is None and v.residual is None


def test_phase_unitary_in_schmidt_basis_is_envariant():
    psi = uneven_state()
    theta = 0.813
    v = is_envariant(psi, UnitaryOp(2, np.diag([np.exp(1j * theta), 1])))
    assert v.envariant and v.residual <= 1e-9


def test_construct_restoring_bell():
    u_e = construct_restoring(bell_state(), swap_unitary())
    np.testing.assert_allclose(u_e.entries, [[0, 1], [1, 0]], atol=1e-12)


def test_construct_restoring_raises_with_mismatch():
    with pytest.raises(NotEnvariantError) as info:
        construct_restoring(uneven_state(), swap_unitary())
    assert info.value.mismatch == pytest.approx(0.4)


def test_construct_restoring_identity():
    psi = even_state(3, 3, seed=4)
    np.testing.assert_allclose(construct_restoring(psi, UnitaryOp.identity(3)).entries, np.eye(3), atol=1e-10)


def test_restoring_is_conjugate_in_correlated_bases():
    # even state in standard bases: u_E must be conj(u_S) on the support
    z = 3
    psi = state_from_schmidt(np.full(z, z**-0.5), dim_s=z, dim_e=5)
    u = random_haar_unitary(z, seed=8)
    u_e = construct_restoring(psi, u).entries
    np.testing.assert_allclose(u_e[:z, :z], u.entries.conj(), atol=1e-12)
    np.testing.assert_allclose(u_e[z:, z:], np.eye(2), atol=1e-12)
    # direct application
    restored = apply_local(apply_local(psi, u, "S"), UnitaryOp(5, u_e), "E")
    assert fidelity(restored, psi) >= 1 - 1e-12


@pytest.mark.parametrize("dim_s", [2, 3, 4, 8])
def test_completeness_on_even_states(dim_s):
    for seed in range(25):
        psi = even_state(dim_s, dim_s + 1, seed)
        u = random_haar_unitary(dim_s, seed + 500)
        v = is_envariant(psi, u)
        assert v.envariant
        assert restoration_residual(psi, u, v.witness) <= 1e-9


def test_soundness_and_marginal_criterion_on_uneven_states():
    tol = 1e-9
    for seed in range(30):
        # uneven state with a degenerate pair: unitaries inside the pair are envariant
        c = np.array([0.6, 0.6, np.sqrt(1 - 0.72)])
        bs = random_haar_unitary(3, seed).entries
        psi = state_from_schmidt(c, bs, dim_e=4)
        block = embed_on_subspace(bs[:, :2], random_haar_unitary(2, seed + 1))
        v = is_envariant(psi, block, tol)
        assert v.envariant
        assert marginal_mismatch(psi, block) <= tol
        restored = apply_local(apply_local(psi, block, "S"), v.witness, "E")
        assert fidelity(restored, psi) >= 1 - 1e-9


def test_witness_is_identity_off_support():
    psi = state_from_schmidt([0.8, 0.6], dim_e=5)
    u = UnitaryOp(2, np.diag([1j, -1]))
    w = is_envariant(psi, u).witness.entries
    support = schmidt(psi).basis_e
    off = np.eye(5) - support @ support.conj().T
    # w acts as identity on the complement
    np.testing.assert_allclose(w @ off, off, atol=1e-12)


def test_negative_direction_schmidt_swap():
    rng = np.random.default_rng(0)
    for seed in range(30):
        d = int(rng.integers(2, 5))
        c = rng.uniform(0.2, 1.0, d)
        c[1] = c[0] * rng.uniform(0.3, 0.8)
        c = c / np.linalg.norm(c)
        psi = state_from_schmidt(c, random_haar_unitary(d, seed).entries, dim_e=d + 1)
        assert not is_envariant(psi, schmidt_swap(psi, 0, 1)).envariant


def test_dimension_mismatch():
    with pytest.raises(ValidationError):
        is_envariant(bell_state(), UnitaryOp.identity(3))


def test_dim_e_smaller_than_dim_s():
    # rank-2 state with dim_s=3: unitaries that move weight onto the third level fail
    psi = state_from_schmidt([2**-0.5, 2**-0.5], dim_s=3, dim_e=2)
    cyc = UnitaryOp(3, np.roll(np.eye(3), 1, axis=0))
    assert not is_envariant(psi, cyc).envariant


def test_maximal_envariance():
    assert is_maximally_envariant(bell_state())
    assert not is_maximally_envariant(PureState.from_amplitudes(2, 2, [1, 0, 0, 0]))
    assert not is_maximally_envariant(uneven_state())
    # even but rank-deficient on S
    assert not is_maximally_envariant(state_from_schmidt([2**-0.5] * 2, dim_s=3, dim_e=2))


def test_equiprobability_examples():
    rep = equiprobability(even_state(4, 4, seed=1))
    np.testing.assert_allclose(rep.probabilities, [0.25] * 4, atol=1e-12)
    assert rep.equiprobable
    rep = equiprobability(bell_state())
    np.testing.assert_allclose(rep.probabilities, [0.5, 0.5], atol=1e-12)
    rep = equiprobability(uneven_state())
    np.testing.assert_allclose(rep.probabilities, [0.7, 0.3], atol=1e-12)
    assert not rep.equiprobable
    assert rep.max_deviation == pytest.approx(0.2)
    assert abs(rep.probabilities.sum() - 1) <= 1e-10


def test_verdict_json_shape():
    d = is_envariant(bell_state(), swap_unitary()).to_dict()
    assert set(d) >= {"envariant", "residual", "reason"}
    assert isinstance(d["envariant"], bool)
