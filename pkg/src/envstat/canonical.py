"""Boltzmann-Gibbs occupations from constrained maximization of the bath count.

The continuous route maximizes ``N ln N - sum n_j ln n_j`` subject to
``sum n_j = N`` and ``sum n_j e_j = E_B``. Stationarity gives
``n_j = mu * exp(lam * e_j)``, so everything reduces to one monotone equation
for ``lam``: the mean level energy under weights ``exp(lam * e_j)`` must equal
``E_B / N``. The discrete route enumerates every feasible occupation vector and
takes the one with the largest exact multinomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .counting import BathSpec, GuardExceeded, Spectrum, _grid, _occupations, multinomial
from .microcanonical import to_fraction

ROOT_TOL = 1e-12
ARGMAX_GUARD = 10**6


class InfeasibleError(ValueError):
    """``E_B`` lies outside ``[N e_min, N e_max]`` or has no occupation vector."""


class DegenerateError(InfeasibleError):
    """``E_B`` sits on the boundary: every unit is in the extreme level."""


@dataclass(frozen=True)
class CanonicalSolution:
    mu: float
    lam: float
    occupations: np.ndarray
    count_residual: float
    mean_energy_residual: float

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "mu": self.mu,
            "occupations": [float(x) for x in self.occupations],
            "residuals": {"count": self.count_residual, "mean_energy": self.mean_energy_residual},
        }


@dataclass(frozen=True)
class ArgmaxResult:
    occupation: tuple[int, ...]
    count: int
    tied: bool
    n_feasible: int


@dataclass(frozen=True)
class ZerothLawReport:
    lambda1: float
    lambda2: float

    @property
    def difference(self) -> float:
        return abs(self.lambda1 - self.lambda2)

    def to_dict(self) -> dict:
        return {"lambda1": self.lambda1, "lambda2": self.lambda2, "difference": self.difference}


def _log_weights(lam: float, x: np.ndarray) -> np.ndarray:
    a = lam * x
    return a - (a.max() + np.log(np.exp(a - a.max()).sum()))


def level_weights(lam: float, energies: Sequence[float]) -> np.ndarray:
    """Normalized ``exp(lam e_j) / sum_i exp(lam e_i)``."""
    return np.exp(_log_weights(lam, np.asarray(energies, dtype=float)))


def mean_energy(lam: float, energies: Sequence[float]) -> float:
    e = np.asarray(energies, dtype=float)
    return float(level_weights(lam, e) @ e)


def _check_feasible(spectrum: Spectrum, N: int, E_B: Fraction) -> None:
    e_min, e_max = spectrum.energies[0], spectrum.energies[-1]
    lo, hi = N * e_min, N * e_max
    if E_B == lo or E_B == hi:
        level = 0 if E_B == lo else spectrum.m - 1
        raise DegenerateError(
            f"degenerate boundary: E_B={E_B} saturates level {level} (e={spectrum.energies[level]});"
            f" interior is ({lo}, {hi})"
        )
    if not lo < E_B < hi:
        raise InfeasibleError(f"E_B={E_B} outside the feasible interval ({lo}, {hi})")


def _solve_lambda(x: np.ndarray, target: float) -> float:
    """Root of ``<x>_lam = target`` for ``x`` in [0, 1] and target in (0, 1).

    Bracket by doubling, then Newton steps that fall back to bisection whenever
    they leave the bracket. The derivative of the mean is the variance.
    """

    def resid(lam):
        w = np.exp(_log_weights(lam, x))
        m = w @ x
        return m - target, w @ (x - m) ** 2

    lo, hi = -1.0, 1.0
    while resid(lo)[0] > 0:
        lo *= 2
    while resid(hi)[0] < 0:
        hi *= 2
    lam = 0.0 if lo < 0 < hi else 0.5 * (lo + hi)
    for _ in range(500):
        f, var = resid(lam)
        if abs(f) <= ROOT_TOL * max(target, 1e-300):
            break
        if f > 0:
            hi = lam
        else:
            lo = lam
        step = lam - f / var if var > 0 else None
        lam = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(lam)):
            break
    return lam


def solve_boltzmann_gibbs(spectrum: Spectrum, N: int, E_B) -> CanonicalSolution:
    """Continuous maximizer ``n_j = mu exp(lam e_j)`` of the Stirling log-count.

    Each listed level is one occupation slot; level degeneracies do not enter.

    Raises
    ------
    DegenerateError
        ``E_B`` equals ``N e_min`` or ``N e_max``.
    InfeasibleError
        ``E_B`` is outside that closed interval.
    """
    E_B = to_fraction(E_B)
    _check_feasible(spectrum, N, E_B)
    e = np.array([float(v) for v in spectrum.energies])
    e_min = spectrum.energies[0]
    span = spectrum.energies[-1] - e_min
    # rescale to [0, 1]; the rescaled target is exact before the float cast
    x = np.array([float((v - e_min) / span) for v in spectrum.energies])
    target = float((E_B / N - e_min) / span)
    lam = _solve_lambda(x, target) / float(span)

    logw = _log_weights(lam, e)
    occ = N * np.exp(logw)
    # mu = N / sum_j exp(lam e_j), assembled in log space
    a = lam * e
    log_z = a.max() + np.log(np.exp(a - a.max()).sum())
    mu = float(N * np.exp(-log_z))
    count_res = abs(occ.sum() - N) / N
    e_b = float(E_B)
    energy_res = abs(occ @ e - e_b) / max(abs(e_b), 1.0)
    return CanonicalSolution(mu, float(lam), occ, float(count_res), float(energy_res))


def argmax_occupation(bath: BathSpec, E_B, guard: int = ARGMAX_GUARD) -> ArgmaxResult:
    """Feasible occupation vector with the largest exact multinomial.

    Ties go to the lexicographically smallest vector and are flagged.
    """
    E_B = to_fraction(E_B)
    g = _grid(bath.unit, E_B)
    t = g.to_int(bath.N, E_B)
    best, best_count, tied, n = None, -1, False, 0
    if t is not None:
        for occ in _occupations(g.steps, bath.N, t):
            n += 1
            if n > guard:
                raise GuardExceeded(f"more than {guard} feasible occupations; raise the guard")
            c = multinomial(occ)
            if c > best_count:
                best, best_count, tied = occ, c, False
            elif c == best_count:
                tied = True
                best = min(best, occ)
    if best is None:
        raise InfeasibleError(f"no occupation vector reaches E_B={E_B}")
    return ArgmaxResult(best, best_count, tied, n)


def zeroth_law_check(spectrum: Spectrum, N: int, E_B, e_k1, e_k2) -> ZerothLawReport:
    """Multipliers of the same bath when two different subsystems draw
    ``e_k1`` and ``e_k2`` from the shared total energy ``E_B``."""
    E_B = to_fraction(E_B)
    l1 = solve_boltzmann_gibbs(spectrum, N, E_B - to_fraction(e_k1)).lam
    l2 = solve_boltzmann_gibbs(spectrum, N, E_B - to_fraction(e_k2)).lam
    return ZerothLawReport(l1, l2)


def rounded_occupations(sol: CanonicalSolution) -> np.ndarray:
    return np.rint(sol.occupations).astype(int)


def kkt_spread(sol: CanonicalSolution, spectrum: Spectrum) -> float:
    """Spread of ``ln n_j - lam e_j`` across levels; zero at a stationary point."""
    e = np.array([float(v) for v in spectrum.energies])
    c = np.log(sol.occupations) - sol.lam * e
    return float(c.max() - c.min())

