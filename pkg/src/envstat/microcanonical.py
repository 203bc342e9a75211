"""Microcanonical states: even Schmidt states supported on one degenerate
energy shell of the system Hamiltonian."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .envariance import embed_on_subspace, is_envariant
from .qstate import PureState, ValidationError, random_haar_unitary, reduced_matrix

SHELL_TOL = 1e-9
SUPPORT_CUTOFF = 1e-10


class EmptyShellError(ValueError):
    pass


def to_fraction(x) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings exactly.

    Floats are rejected so that shell membership never depends on rounding.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValidationError("booleans are not energies")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational number: {x!r}") from exc
    raise ValidationError(f"expected an exact rational (int or 'p/q' string), got {x!r}")


def fraction_str(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """System Hamiltonian, either diagonal with exact rational energies or a
    dense Hermitian matrix."""

    dim: int
    diagonal: Optional[tuple[Fraction, ...]] = None
    dense: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if (self.diagonal is None) == (self.dense is None):
            raise ValidationError("give exactly one of 'diagonal' or 'dense'")
        if self.diagonal is not None:
            diag = tuple(to_fraction(e) for e in self.diagonal)
            if len(diag) != self.dim:
                raise ValidationError(f"diagonal has {len(diag)} entries, dim is {self.dim}")
            object.__setattr__(self, "diagonal", diag)
        else:
            h = np.array(self.dense, dtype=complex)
            if h.shape != (self.dim, self.dim):
                raise ValidationError(f"dense matrix has shape {h.shape}, dim is {self.dim}")
            if np.max(np.abs(h - h.conj().T)) > 1e-10:
                raise ValidationError("Hamiltonian is not Hermitian")
            h.setflags(write=False)
            object.__setattr__(self, "dense", h)

    @classmethod
    def from_diagonal(cls, energies: Sequence) -> Hamiltonian:
        return cls(len(energies), diagonal=tuple(energies))

    @classmethod
    def from_dense(cls, h) -> Hamiltonian:
        h = np.asarray(h, dtype=complex)
        return cls(h.shape[0], dense=h)

    def matrix(self) -> np.ndarray:
        if self.diagonal is not None:
            return np.diag([float(e) for e in self.diagonal]).astype(complex)
        return self.dense

    def to_dict(self) -> dict:
        if self.diagonal is not None:
            return {"dim": self.dim, "diagonal": [fraction_str(e) for e in self.diagonal]}
        return {"dim": self.dim, "dense": {"re": self.dense.real.tolist(), "im": self.dense.imag.tolist()}}

    @classmethod
    def from_dict(cls, data: dict) -> Hamiltonian:
        if not isinstance(data, dict):
            raise ValidationError("Hamiltonian must be a JSON object")
        unknown = set(data) - {"dim", "diagonal", "dense"}
        if unknown:
            raise ValidationError(f"unknown Hamiltonian keys: {sorted(unknown)}")
        if "dim" not in data:
            raise ValidationError("Hamiltonian needs 'dim'")
        dim = int(data["dim"])
        if "diagonal" in data and "dense" not in data:
            return cls(dim, diagonal=tuple(to_fraction(e) for e in data["diagonal"]))
        if "dense" in data and "diagonal" not in data:
            d = data["dense"]
            if not isinstance(d, dict) or set(d) - {"re", "im"} or "re" not in d:
                raise ValidationError("'dense' must be {'re': [[...]], 'im': [[...]]}")
            re = np.asarray(d["re"], dtype=float)
            im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
            return cls(dim, dense=re + 1j * im)
        raise ValidationError("give exactly one of 'diagonal' or 'dense'")


@dataclass(frozen=True, eq=False)
class MicrocanonicalState:
    state: PureState
    shell_energy: Fraction
    shell_basis: np.ndarray = field(repr=False)
    phases: np.ndarray = field(repr=False)

    @property
    def Z(self) -> int:
        """Shell dimension, i.e. the microcanonical partition function."""
        return int(self.shell_basis.shape[1])


@dataclass(frozen=True)
class MicrocanonicalReport:
    condition_i: bool
    condition_ii: bool
    support_rank: int
    energy: float
    marginal_spread: float
    shell_residual: float
    failed_unitaries: int

    @property
    def verdict(self) -> bool:
        return self.condition_i and self.condition_ii

    def to_dict(self) -> dict:
        return {
            "condition_i": self.condition_i,
            "condition_ii": self.condition_ii,
            "verdict": self.verdict,
            "support_rank": self.support_rank,
            "energy": self.energy,
            "marginal_spread": self.marginal_spread,
            "shell_residual": self.shell_residual,
            "failed_unitaries": self.failed_unitaries,
        }


def degenerate_shell(h: Hamiltonian, energy, tol: float = SHELL_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the eigenspace of ``h`` at ``energy``.

    Diagonal Hamiltonians are matched exactly; dense ones by ``|e - E| <= tol``.
    An empty shell is returned as a ``(dim, 0)`` array.
    """
    if h.diagonal is not None:
        target = to_fraction(energy)
        idx = [i for i, e in enumerate(h.diagonal) if e == target]
        return np.eye(h.dim, dtype=complex)[:, idx]
    w, v = np.linalg.eigh(h.dense)
    mask = np.abs(w - float(to_fraction(energy))) <= tol
    return v[:, mask]


def build_microcanonical(h: Hamiltonian, energy, dim_e: int, phase_seed: int = 0) -> MicrocanonicalState:
    """Even state ``Z^{-1/2} sum_k e^{i phi_k} |s_k>|k>`` over the shell at ``energy``.

    The environment partners are the first ``Z`` standard basis vectors and the
    phases are uniform on ``[0, 2 pi)`` from ``phase_seed``.
    """
    e = to_fraction(energy)
    shell = degenerate_shell(h, e)
    z = shell.shape[1]
    if z == 0:
        raise EmptyShellError(f"no eigenvalue of H_S equals {e}")
    if dim_e < z:
        raise ValidationError(f"dim_e={dim_e} cannot carry an even state of rank Z={z}")
    phases = np.random.default_rng(phase_seed).uniform(0.0, 2 * np.pi, size=z)
    m = (shell * np.exp(1j * phases)) @ np.eye(dim_e, z).T / np.sqrt(z)
    state = PureState.from_matrix(m)
    phases.setflags(write=False)
    return MicrocanonicalState(state, e, shell, phases)


def _check_dim(state: PureState, h: Hamiltonian) -> None:
    if h.dim != state.dim_s:
        raise ValidationError(f"H_S has dim {h.dim}, state has dim_s={state.dim_s}")


def internal_energy(state: PureState, h: Hamiltonian) -> float:
    """``<psi| H_S (x) I |psi> = tr(rho_S H_S)``."""
    _check_dim(state, h)
    e = np.trace(reduced_matrix(state, "S") @ h.matrix())
    if abs(e.imag) > 1e-10:
        raise ValidationError(f"energy has imaginary part {e.imag:.3g}")
    return float(e.real)


def energy_variance(state: PureState, h: Hamiltonian) -> float:
    _check_dim(state, h)
    rho = reduced_matrix(state, "S")
    hm = h.matrix()
    mean = np.trace(rho @ hm).real
    return float(np.trace(rho @ hm @ hm).real - mean**2)


def _support(state: PureState) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(reduced_matrix(state, "S"))
    keep = w > SUPPORT_CUTOFF
    return w[keep], v[:, keep]


def verify_microcanonical(
    state: PureState,
    h: Hamiltonian,
    tol: float = SHELL_TOL,
    n_unitaries: int = 20,
    seed: int = 0,
) -> MicrocanonicalReport:
    """Check (i) maximal envariance on the support and (ii) energetic degeneracy.

    Condition (i) requires ``rho_S`` to be maximally mixed on its support and
    ``n_unitaries`` Haar-random unitaries on that support to pass
    :func:`is_envariant`. Condition (ii) requires the support to lie in a single
    eigenspace of ``H_S``.
    """
    _check_dim(state, h)
    p, basis = _support(state)
    r = p.size
    spread = float(p.max() - p.min())
    failed = 0
    for i in range(n_unitaries):
        u = embed_on_subspace(basis, random_haar_unitary(r, seed + i))
        if not is_envariant(state, u, tol).envariant:
            failed += 1
    cond_i = spread <= tol and failed == 0

    hm = h.matrix()
    e_mean = float(np.trace(basis.conj().T @ hm @ basis).real / r)
    shell_res = float(np.max(np.abs(hm @ basis - e_mean * basis)))
    cond_ii = shell_res <= tol
    return MicrocanonicalReport(cond_i, cond_ii, r, internal_energy(state, h), spread, shell_res, failed)
