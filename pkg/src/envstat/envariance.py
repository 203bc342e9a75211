"""Entanglement-assisted invariance of bipartite pure states.

A system unitary ``u_S`` is envariant for ``|psi>`` when some environment
unitary ``u_E`` undoes it: ``(I (x) u_E)(u_S (x) I)|psi> = |psi>``. The
decision procedure used here is the marginal test: ``u_S`` is envariant
exactly when it leaves ``rho_S`` unchanged. Environment-side operations
cannot alter ``rho_S``, so the test is necessary; two purifications of the same
``rho_S`` on the same environment differ by an environment unitary, so it is
also sufficient, and that unitary is built explicitly as the witness.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .qstate import (
    PureState,
    UnitaryOp,
    ValidationError,
    apply_local,
    fidelity,
    reduced_matrix,
    schmidt,
)

DEFAULT_TOL = 1e-9
RESTORE_TOL = 1e-9

MARGINAL_NOT_PRESERVED = "marginal-not-preserved"
CONSTRUCTED = "constructed"
RESTORATION_FAILED = "restoration-failed"


class NotEnvariantError(ValueError):
    """``u_S`` changes the system marginal, so no restoring ``u_E`` exists."""

    def __init__(self, mismatch: float):
        super().__init__(f"u_S does not preserve rho_S (max-abs mismatch {mismatch:.3e})")
        self.mismatch = mismatch


@dataclass(frozen=True)
class EnvarianceVerdict:
    envariant: bool
    witness: Optional[UnitaryOp]
    residual: Optional[float]
    reason: str
    marginal_mismatch: float

    def to_dict(self, include_witness: bool = False) -> dict:
        out = {
            "envariant": self.envariant,
            "residual": self.residual,
            "reason": self.reason,
            "marginal_mismatch": self.marginal_mismatch,
        }
        if include_witness and self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out


@dataclass(frozen=True)
class EquiprobabilityReport:
    probabilities: np.ndarray
    equiprobable: bool
    max_deviation: float


def _check_dims(state: PureState, u_s: UnitaryOp) -> None:
    if u_s.dim != state.dim_s:
        raise ValidationError(f"u_S has dim {u_s.dim}, state has dim_s={state.dim_s}")


def marginal_mismatch(state: PureState, u_s: UnitaryOp) -> float:
    """``max |u_S rho_S u_S^dag - rho_S|`` entrywise."""
    _check_dims(state, u_s)
    rho = reduced_matrix(state, "S")
    u = u_s.entries
    return float(np.max(np.abs(u @ rho @ u.conj().T - rho)))


def _polar_unitary(w: np.ndarray) -> np.ndarray:
    a, _, bh = np.linalg.svd(w)
    return a @ bh


def _witness(state: PureState, u_s: UnitaryOp) -> UnitaryOp:
    # With M = A diag(a) B^T, u_S A = A W on the Schmidt support, and W commutes
    # with diag(a) whenever rho_S is preserved; u_E = B conj(W) B^dag restores.
    dec = schmidt(state)
    a_s, b_e = dec.basis_s, dec.basis_e
    w = _polar_unitary(a_s.conj().T @ u_s.entries @ a_s)
    proj = b_e @ b_e.conj().T
    u_e = b_e @ w.conj() @ b_e.conj().T + (np.eye(state.dim_e) - proj)
    # clean rounding so the witness passes the strict unitarity check
    return UnitaryOp(state.dim_e, _polar_unitary(u_e))


def restoration_residual(state: PureState, u_s: UnitaryOp, u_e: UnitaryOp) -> float:
    """``1 - |<psi| (I (x) u_E)(u_S (x) I) |psi>|^2``."""
    restored = apply_local(apply_local(state, u_s, "S"), u_e, "E")
    return max(0.0, 1.0 - fidelity(state, restored))


def construct_restoring(state: PureState, u_s: UnitaryOp, tol: float = DEFAULT_TOL) -> UnitaryOp:
    """Environment unitary that undoes ``u_s`` on ``state``.

    The result acts as the identity outside the environment-side Schmidt
    support.

    Raises
    ------
    NotEnvariantError
        If ``u_s`` changes ``rho_S`` by more than ``tol`` (max-abs).
    """
    mismatch = marginal_mismatch(state, u_s)
    if mismatch > tol:
        raise NotEnvariantError(mismatch)
    return _witness(state, u_s)


def is_envariant(state: PureState, u_s: UnitaryOp, tol: float = DEFAULT_TOL) -> EnvarianceVerdict:
    """Decide envariance of ``u_s`` for ``state`` and attach a witness.

    Parameters
    ----------
    state : PureState
        Bipartite pure state.
    u_s : UnitaryOp
        Unitary acting on the system side; ``u_s.dim`` must equal ``state.dim_s``.
    tol : float
        Max-abs tolerance on marginal preservation.

    Returns
    -------
    EnvarianceVerdict
        ``envariant`` is true only when a witness was built and restores the
        state with ``1 - fidelity <= 1e-9``.
    """
    mismatch = marginal_mismatch(state, u_s)
    if mismatch > tol:
        return EnvarianceVerdict(False, None, None, MARGINAL_NOT_PRESERVED, mismatch)
    u_e = _witness(state, u_s)
    residual = restoration_residual(state, u_s, u_e)
    ok = residual <= RESTORE_TOL
    return EnvarianceVerdict(ok, u_e, residual, CONSTRUCTED if ok else RESTORATION_FAILED, mismatch)


def is_maximally_envariant(state: PureState, tol: float = DEFAULT_TOL) -> bool:
    """True when the Schmidt decomposition is even and spans all of S."""
    dec = schmidt(state)
    if dec.rank != state.dim_s:
        return False
    c = dec.coefficients
    return bool(c.max() - c.min() <= tol)


def equiprobability(state: PureState, tol: float = DEFAULT_TOL) -> EquiprobabilityReport:
    p = schmidt(state).coefficients ** 2
    p = p / p.sum()
    dev = float(np.max(np.abs(p - 1.0 / p.size)))
    return EquiprobabilityReport(p, dev <= tol, dev)


def schmidt_swap(state: PureState, k: int = 0, l: int = 1) -> UnitaryOp:
    """System unitary exchanging the ``k``-th and ``l``-th Schmidt vectors."""
    dec = schmidt(state)
    if max(k, l) >= dec.rank:
        raise ValidationError(f"state has Schmidt rank {dec.rank}")
    sk, sl = dec.basis_s[:, k], dec.basis_s[:, l]
    u = (
        np.eye(state.dim_s)
        - np.outer(sk, sk.conj())
        - np.outer(sl, sl.conj())
        + np.outer(sk, sl.conj())
        + np.outer(sl, sk.conj())
    )
    return UnitaryOp(state.dim_s, u)


def embed_on_subspace(basis: np.ndarray, v: UnitaryOp) -> UnitaryOp:
    """Lift a unitary on ``span(basis)`` to the full space, identity elsewhere."""
    basis = np.asarray(basis, dtype=complex)
    if basis.shape[1] != v.dim:
        raise ValidationError(f"subspace has dim {basis.shape[1]}, unitary has dim {v.dim}")
    d = basis.shape[0]
    proj = basis @ basis.conj().T
    return UnitaryOp(d, basis @ v.entries @ basis.conj().T + np.eye(d) - proj)


def swap_unitary() -> UnitaryOp:
    """Spin flip ``|0> <-> |1>`` on a qubit."""
    return UnitaryOp(2, np.array([[0, 1], [1, 0]]))
