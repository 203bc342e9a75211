"""Dense bipartite pure states: local operations, partial traces, Schmidt
decomposition, entropies and mutual information.

Amplitudes are stored flat with ``amplitude(i, j) = amplitudes[i * dim_e + j]``
for system index ``i`` and environment index ``j``; :attr:`PureState.matrix`
exposes the same data as a ``(dim_s, dim_e)`` array.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGEN_TOL = 1e-10
UNITARY_TOL = 1e-10
SCHMIDT_CUTOFF = 1e-12
SERIAL_NORM_TOL = 1e-9

Side = Literal["S", "E"]


class ValidationError(ValueError):
    """Raised when a state or operator violates its type invariants."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized pure state on a system-environment product space."""

    dim_s: int
    dim_e: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if int(self.dim_s) < 1 or int(self.dim_e) < 1:
            raise ValidationError("subsystem dimensions must be positive")
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size != self.dim_s * self.dim_e:
            raise ValidationError(
                f"expected {self.dim_s * self.dim_e} amplitudes, got {amps.size}"
            )
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized (|psi|^2 = {norm2!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, dim_s: int, dim_e: int, amplitudes, normalize: bool = True) -> PureState:
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise ValidationError("zero vector cannot be normalized")
            amps = amps / norm
        return cls(dim_s, dim_e, amps)

    @classmethod
    def from_matrix(cls, matrix, normalize: bool = True) -> PureState:
        """Build a state from its ``(dim_s, dim_e)`` amplitude matrix."""
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2:
            raise ValidationError("amplitude matrix must be two-dimensional")
        return cls.from_amplitudes(m.shape[0], m.shape[1], m.ravel(), normalize=normalize)

    @classmethod
    def product(cls, psi_s, psi_e) -> PureState:
        a = np.asarray(psi_s, dtype=complex)
        b = np.asarray(psi_e, dtype=complex)
        return cls.from_amplitudes(a.size, b.size, np.kron(a, b))

    @property
    def matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dim_s, self.dim_e)

    def to_dict(self) -> dict:
        return {
            "dimS": int(self.dim_s),
            "dimE": int(self.dim_e),
            "re": [float(x) for x in self.amplitudes.real],
            "im": [float(x) for x in self.amplitudes.imag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> PureState:
        _check_keys(data, {"dimS", "dimE", "re", "im"}, "state")
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
        if re.shape != im.shape:
            raise ValidationError("'re' and 'im' must have the same length")
        amps = re + 1j * im
        # text files carry ~12 significant digits; absorb that, nothing more
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > SERIAL_NORM_TOL:
            raise ValidationError(f"state is not normalized (|psi|^2 = {norm2!r})")
        return cls(int(data["dimS"]), int(data["dimE"]), amps / np.sqrt(norm2))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dim: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.shape != (self.dim, self.dim):
            raise ValidationError(f"expected a {self.dim}x{self.dim} matrix, got {m.shape}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValidationError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(m).min() < -EIGEN_TOL:
            raise ValidationError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", m)

    @classmethod
    def from_matrix(cls, m) -> DensityMatrix:
        m = np.asarray(m, dtype=complex)
        return cls(m.shape[0], 0.5 * (m + m.conj().T))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def rank(self, cutoff: float = 1e-10) -> int:
        return int(np.count_nonzero(self.eigenvalues() > cutoff))


@dataclass(frozen=True, eq=False)
class UnitaryOp:
    dim: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        u = _frozen(self.entries)
        if u.shape != (self.dim, self.dim):
            raise ValidationError(f"expected a {self.dim}x{self.dim} matrix, got {u.shape}")
        err = np.max(np.abs(u.conj().T @ u - np.eye(self.dim)), initial=0.0)
        if err > UNITARY_TOL:
            raise ValidationError(f"operator is not unitary (max |U^dag U - I| = {err:.3g})")
        object.__setattr__(self, "entries", u)

    @classmethod
    def from_matrix(cls, u) -> UnitaryOp:
        u = np.asarray(u, dtype=complex)
        return cls(u.shape[0], u)

    @classmethod
    def identity(cls, dim: int) -> UnitaryOp:
        return cls(dim, np.eye(dim))

    @property
    def dagger(self) -> UnitaryOp:
        return UnitaryOp(self.dim, self.entries.conj().T)

    def to_dict(self) -> dict:
        return {
            "dim": int(self.dim),
            "re": self.entries.real.tolist(),
            "im": self.entries.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> UnitaryOp:
        _check_keys(data, {"dim", "re", "im"}, "unitary")
        m = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(int(data["dim"]), m)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``psi = sum_k coefficients[k] * basis_s[:, k] (x) basis_e[:, k]``."""

    coefficients: np.ndarray
    basis_s: np.ndarray = field(repr=False)
    basis_e: np.ndarray = field(repr=False)

    @property
    def rank(self) -> int:
        return int(self.coefficients.size)

    def reconstruct(self) -> np.ndarray:
        """Flat amplitude vector rebuilt from the decomposition."""
        m = (self.basis_s * self.coefficients) @ self.basis_e.T
        return m.ravel()


def _check_keys(data: dict, allowed: set, what: str) -> None:
    if not isinstance(data, dict):
        raise ValidationError(f"{what} must be a JSON object")
    unknown = set(data) - allowed
    if unknown:
        raise ValidationError(f"unknown {what} keys: {sorted(unknown)}")
    missing = allowed - set(data)
    if missing:
        raise ValidationError(f"missing {what} keys: {sorted(missing)}")


def fidelity(a: PureState | np.ndarray, b: PureState | np.ndarray) -> float:
    """``|<a|b>|^2``; blind to global phase."""
    va = a.amplitudes if isinstance(a, PureState) else np.ravel(a)
    vb = b.amplitudes if isinstance(b, PureState) else np.ravel(b)
    return float(abs(np.vdot(va, vb)) ** 2)


def schmidt(state: PureState) -> SchmidtDecomposition:
    """Schmidt decomposition from the SVD of the amplitude matrix.

    Singular values below ``1e-12`` are dropped from the rank. Within a
    degenerate block the returned bases are whatever the SVD produces; callers
    should not rely on a particular choice.
    """
    if not isinstance(state, PureState):
        raise ValidationError("schmidt expects a PureState")
    u, s, vh = np.linalg.svd(state.matrix, full_matrices=False)
    r = max(int(np.count_nonzero(s > SCHMIDT_CUTOFF)), 1)
    return SchmidtDecomposition(
        coefficients=_frozen(s[:r]).real.copy(),
        basis_s=_frozen(u[:, :r]),
        basis_e=_frozen(vh[:r].T),
    )


def reduced_matrix(state: PureState, keep: Side = "S") -> np.ndarray:
    """Raw reduced density matrix as an array (no invariant checks)."""
    m = state.matrix
    if keep == "S":
        rho = m @ m.conj().T
    elif keep == "E":
        rho = m.T @ m.conj()
    else:
        raise ValueError(f"keep must be 'S' or 'E', not {keep!r}")
    return 0.5 * (rho + rho.conj().T)


def partial_trace(state: PureState, keep: Side = "S") -> DensityMatrix:
    """Reduced state of the kept side, tracing out the other one."""
    rho = reduced_matrix(state, keep)
    return DensityMatrix(rho.shape[0], rho)


def apply_local(state: PureState, u: UnitaryOp, side: Side = "S") -> PureState:
    m = state.matrix
    if side == "S":
        if u.dim != state.dim_s:
            raise ValidationError(f"unitary dim {u.dim} does not match dim_s={state.dim_s}")
        out = u.entries @ m
    elif side == "E":
        if u.dim != state.dim_e:
            raise ValidationError(f"unitary dim {u.dim} does not match dim_e={state.dim_e}")
        out = m @ u.entries.T
    else:
        raise ValueError(f"side must be 'S' or 'E', not {side!r}")
    # renormalize away rounding drift only
    return PureState.from_amplitudes(state.dim_s, state.dim_e, out.ravel())


def _entropy_of_spectrum(p: np.ndarray) -> float:
    p = p[p > 1e-15]
    return float(-np.sum(p * np.log(p)))


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """Entropy ``-tr(rho ln rho)`` in nats, with ``0 ln 0 = 0``."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    ev = np.clip(np.linalg.eigvalsh(m), 0.0, 1.0)
    return float(np.clip(_entropy_of_spectrum(ev), 0.0, np.log(m.shape[0])))


def mutual_information(state: PureState) -> float:
    """``S(rho_S) + S(rho_E) - S(rho_SE)`` for a globally pure state (nats)."""
    s_s = von_neumann_entropy(reduced_matrix(state, "S"))
    s_e = von_neumann_entropy(reduced_matrix(state, "E"))
    return max(s_s + s_e, 0.0)


def split_reduced(rho: np.ndarray, dim_a: int, dim_b: int) -> tuple[np.ndarray, np.ndarray]:
    """Marginals of a density matrix on ``A (x) B``."""
    if rho.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ValidationError(f"cannot split a {rho.shape} matrix as {dim_a}x{dim_b}")
    t = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    return np.einsum("ijkj->ik", t), np.einsum("ijil->jl", t)


def internal_mutual_information(state: PureState, dim_a: int, dim_b: int) -> float:
    """Mutual information between the two factors of the system side.

    The system space is read as ``A (x) B`` with ``dim_s = dim_a * dim_b``; the
    quantity is ``S(rho_A) + S(rho_B) - S(rho_S)`` of the reduced system state.
    With ``dim_e == 1`` it coincides with the pure-state formula for ``A|B``.
    """
    if dim_a * dim_b != state.dim_s:
        raise ValidationError(f"dim_s={state.dim_s} is not {dim_a}*{dim_b}")
    rho = reduced_matrix(state, "S")
    rho_a, rho_b = split_reduced(rho, dim_a, dim_b)
    d = von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) - von_neumann_entropy(rho)
    return max(d, 0.0)


def random_haar_unitary(dim: int, seed: int | None = None) -> UnitaryOp:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The phases of ``diag(R)`` are divided out so the distribution is exactly
    Haar and not biased by the QR sign convention.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return UnitaryOp(dim, q)


def random_state(dim_s: int, dim_e: int, seed: int | None = None) -> PureState:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim_s * dim_e) + 1j * rng.standard_normal(dim_s * dim_e)
    return PureState.from_amplitudes(dim_s, dim_e, v)


def state_from_schmidt(coefficients, basis_s=None, basis_e=None, dim_s=None, dim_e=None) -> PureState:
    """Assemble ``sum_k c_k |s_k>|e_k>``; bases default to the standard ones."""
    c = np.asarray(coefficients, dtype=complex)
    z = c.size
    dim_s = dim_s or (z if basis_s is None else np.shape(basis_s)[0])
    dim_e = dim_e or (z if basis_e is None else np.shape(basis_e)[0])
    bs = np.eye(dim_s, z) if basis_s is None else np.asarray(basis_s, dtype=complex)
    be = np.eye(dim_e, z) if basis_e is None else np.asarray(basis_e, dtype=complex)
    return PureState.from_matrix((bs * c) @ be.T)


def bell_state() -> PureState:
    """``(|00> + |11>)/sqrt(2)`` on two qubits."""
    return PureState.from_amplitudes(2, 2, [1, 0, 0, 1])
