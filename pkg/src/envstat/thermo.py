"""Entropy route to the canonical weight.

Boltzmann entropy ``H = kB ln N`` of exact counts, the bath temperature from a
finite difference of ``H_B`` over neighbouring reachable bath energies, the
canonical weight ``exp((F_S - e_k)/(kB T))`` and its correction by the quantum
mutual information ``D`` when system and bath are correlated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .counting import BathSpec, Spectrum, count_from_occupations, reachable_neighbours
from .microcanonical import fraction_str, to_fraction
from .qstate import PureState, ValidationError, internal_mutual_information, mutual_information, reduced_matrix, split_reduced

KB = 1.0
MIXED_TOL = 1e-9


class DomainError(ValueError):
    """Inputs fall outside the regime where an identity is claimed to hold."""


def log_ratio(p: int, q: int) -> float:
    """``ln(p / q)`` for big positive integers without losing the small
    difference between two huge logarithms."""
    if p <= 0 or q <= 0:
        raise ValueError("log_ratio needs positive integers")
    r = Fraction(p, q)
    num, den = r.numerator, r.denominator
    shift = min(num.bit_length(), den.bit_length()) - 1
    # ln(num/den) = ln((num >> s) / (den >> s)) up to the dropped low bits
    if shift > 64:
        num >>= shift - 64
        den >>= shift - 64
    return math.log(num) - math.log(den)


def boltzmann_entropy(count: int, kB: float = KB) -> float:
    """``kB ln(count)`` for an arbitrary-precision count."""
    if count < 1:
        raise ValueError("entropy of an empty shell is undefined (count must be >= 1)")
    return kB * math.log(count)


def entropy_additivity_check(system_count: int, bath_count: int, joint_count: int) -> float:
    """``ln(joint) - ln(system) - ln(bath)``: zero for uncorrelated counting."""
    for c in (system_count, bath_count, joint_count):
        if c < 1:
            raise ValueError("counts must be >= 1")
    return log_ratio(joint_count, system_count * bath_count)


@dataclass(frozen=True)
class BathTemperature:
    beta: float
    lower: Optional[Fraction]
    upper: Optional[Fraction]

    @property
    def temperature(self) -> float:
        return math.inf if self.beta == 0 else 1.0 / self.beta


def bath_inverse_temperature(bath: BathSpec, E_B, kB: float = KB, table: dict | None = None) -> BathTemperature:
    """``1/T = dH_B/dE_B`` as a difference quotient over reachable energies.

    Central difference between the nearest reachable bath energies below and
    above ``E_B``; one-sided at the ends of the reachable range.
    """
    E_B = to_fraction(E_B)
    if table is None:
        # three counts from occupation sums; no full table for large baths
        if count_from_occupations(bath, E_B) == 0:
            raise ValidationError(f"E_B={E_B} is not a reachable bath energy")
        lower, upper = reachable_neighbours(bath, E_B)
        table = {e: count_from_occupations(bath, e) for e in (lower, E_B, upper) if e is not None}
    else:
        if E_B not in table:
            raise ValidationError(f"E_B={E_B} is not a reachable bath energy")
        energies = sorted(table)
        i = energies.index(E_B)
        lower = energies[i - 1] if i > 0 else None
        upper = energies[i + 1] if i + 1 < len(energies) else None
    if lower is None and upper is None:
        raise ValidationError(f"E_B={E_B} has no reachable neighbour; temperature undefined")
    a = lower if lower is not None else E_B
    b = upper if upper is not None else E_B
    beta = kB * log_ratio(table[b], table[a]) / float(b - a)
    return BathTemperature(beta, lower, upper)


def bath_temperature(bath: BathSpec, E_B, kB: float = KB) -> float:
    """Bath temperature; ``inf`` where the count is locally flat."""
    return bath_inverse_temperature(bath, E_B, kB).temperature


def free_energy(E_S, T: float, system_count: int, kB: float = KB) -> float:
    """``F_S = E_S - T H_S`` with ``H_S = kB ln(system_count)``."""
    return float(to_fraction(E_S)) - T * boltzmann_entropy(system_count, kB)


def canonical_weight(e_k, F_S: float, T: float, kB: float = KB) -> float:
    return generalized_canonical_weight(e_k, F_S, T, kB, 0.0)


def generalized_canonical_weight(e_k, F_S: float, T: float, kB: float = KB, D: float = 0.0) -> float:
    """``exp((F_S - e_k)/(kB T) - D)``; ``D = 0`` is the uncorrelated weight."""
    if T == 0:
        raise ValueError("temperature must be non-zero")
    if D < 0:
        raise ValueError("mutual information D must be non-negative")
    return math.exp((F_S - float(to_fraction(e_k))) / (kB * T) - D)


@dataclass(frozen=True)
class ThermoReport:
    kB: float
    temperature: float
    free_energy: float
    entropy_s: float
    entropy_b: float
    weights: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kB": self.kB,
            "temperature": self.temperature,
            "inverse_temperature": 1.0 / self.temperature,
            "free_energy": self.free_energy,
            "entropy_S": self.entropy_s,
            "entropy_B": self.entropy_b,
            "weights": {fraction_str(e): w for e, w in self.weights.items()},
        }


def thermo_report(system: Spectrum, bath: BathSpec, E_B, E_S=None, kB: float = KB) -> ThermoReport:
    """Canonical weights of the system levels against a bath at ``E_B``.

    ``E_S`` is the system energy at which ``F_S`` is anchored (default: the
    system ground level); the shell size there is the level degeneracy.
    """
    E_B = to_fraction(E_B)
    E_S = system.energies[0] if E_S is None else to_fraction(E_S)
    if E_S not in system.energies:
        raise ValidationError(f"E_S={E_S} is not a system level")
    bt = bath_inverse_temperature(bath, E_B, kB)
    if bt.beta == 0:
        raise DomainError("bath is at infinite temperature (flat entropy); weights undefined")
    T = bt.temperature
    g_s = system.degeneracies[system.energies.index(E_S)]
    F = free_energy(E_S, T, g_s, kB)
    weights = {e: canonical_weight(e, F, T, kB) for e in system.energies}
    return ThermoReport(kB, T, F, boltzmann_entropy(g_s, kB), boltzmann_entropy(count_from_occupations(bath, E_B), kB), weights)


@dataclass(frozen=True)
class MutualInfoReport:
    D: float
    log_count_ratio: float

    @property
    def discrepancy(self) -> float:
        # the count ratio is <= 1 for correlated states, so its log is -D
        return abs(self.D + self.log_count_ratio)

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "log_count_ratio": self.log_count_ratio,
            "abs_log_count_ratio": abs(self.log_count_ratio),
            "discrepancy": self.discrepancy,
        }


def _maximally_mixed_on_support(rho: np.ndarray, tol: float) -> bool:
    p = np.linalg.eigvalsh(rho)
    p = p[p > 1e-10]
    return bool(p.size and p.max() - p.min() <= tol)


def mutual_info_identity_check(
    state: PureState,
    count_s: int,
    count_b: int,
    count_joint: int,
    split: tuple[int, int] | None = None,
    tol: float = MIXED_TOL,
) -> MutualInfoReport:
    """Compare ``D`` with the log of ``count_joint / (count_s * count_b)``.

    Without ``split`` the two parties are the state's own S and E and the joint
    state is pure. With ``split=(d_a, d_b)`` the system side is read as
    ``A (x) B`` and ``D`` is their mutual information inside ``rho_S``. The
    identity only holds when every marginal involved is maximally mixed on its
    support; anything else raises :class:`DomainError`.
    """
    if split is None:
        marginals = [reduced_matrix(state, "S"), reduced_matrix(state, "E")]
        D = mutual_information(state)
    else:
        rho = reduced_matrix(state, "S")
        marginals = [rho, *split_reduced(rho, *split)]
        D = internal_mutual_information(state, *split)
    if not all(_maximally_mixed_on_support(r, tol) for r in marginals):
        raise DomainError("marginals are not maximally mixed on their supports")
    return MutualInfoReport(D, log_ratio(count_joint, count_s * count_b))


def support_count(rho: np.ndarray, cutoff: float = 1e-10) -> int:
    """Number of microstates of a maximally mixed state: its rank."""
    return int(np.count_nonzero(np.linalg.eigvalsh(rho) > cutoff))
