"""Exact degeneracy counting for a bath of ``N`` identical, non-interacting units.

All energies are exact :class:`~fractions.Fraction` values. Internally they are
rescaled to non-negative integers (shift by the ground level, multiply by the
common denominator) so that energy matching is an integer comparison. Counts
are Python ints and never rounded.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .microcanonical import fraction_str, to_fraction
from .qstate import ValidationError

BRUTE_FORCE_GUARD = 10**7


class GuardExceeded(RuntimeError):
    """Explicit enumeration refused because the configuration space is too large."""


@dataclass(frozen=True)
class Level:
    energy: Fraction
    degeneracy: int = 1


@dataclass(frozen=True)
class Spectrum:
    """Single-unit spectrum: strictly increasing exact energies with degeneracies."""

    levels: tuple[Level, ...]

    def __post_init__(self):
        levels = tuple(
            lv if isinstance(lv, Level) else Level(to_fraction(lv[0]), int(lv[1])) for lv in self.levels
        )
        levels = tuple(Level(to_fraction(lv.energy), int(lv.degeneracy)) for lv in levels)
        if not levels:
            raise ValidationError("spectrum needs at least one level")
        for lv in levels:
            if lv.degeneracy < 1:
                raise ValidationError("level degeneracies must be >= 1")
        for a, b in zip(levels, levels[1:]):
            if not a.energy < b.energy:
                raise ValidationError("level energies must be strictly increasing")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def of(cls, energies: Iterable, degeneracies: Iterable[int] | None = None) -> Spectrum:
        energies = [to_fraction(e) for e in energies]
        degs = [1] * len(energies) if degeneracies is None else list(degeneracies)
        if len(degs) != len(energies):
            raise ValidationError("energies and degeneracies differ in length")
        return cls(tuple(Level(e, g) for e, g in zip(energies, degs)))

    @property
    def m(self) -> int:
        return len(self.levels)

    @property
    def energies(self) -> tuple[Fraction, ...]:
        return tuple(lv.energy for lv in self.levels)

    @property
    def degeneracies(self) -> tuple[int, ...]:
        return tuple(lv.degeneracy for lv in self.levels)

    def to_dict(self) -> dict:
        return {"levels": [{"energy": fraction_str(lv.energy), "degeneracy": lv.degeneracy} for lv in self.levels]}

    @classmethod
    def from_dict(cls, data: dict) -> Spectrum:
        if not isinstance(data, dict) or set(data) != {"levels"}:
            raise ValidationError("spectrum must be {'levels': [...]}")
        levels = []
        for item in data["levels"]:
            if not isinstance(item, dict) or "energy" not in item or set(item) - {"energy", "degeneracy"}:
                raise ValidationError(f"bad level entry: {item!r}")
            deg = item.get("degeneracy", 1)
            if isinstance(deg, bool) or not isinstance(deg, int):
                raise ValidationError(f"degeneracy must be an integer, got {deg!r}")
            levels.append(Level(to_fraction(item["energy"]), deg))
        return cls(tuple(levels))


@dataclass(frozen=True)
class BathSpec:
    unit: Spectrum
    N: int

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise ValidationError("bath needs N >= 1 units")

    def to_dict(self) -> dict:
        return {**self.unit.to_dict(), "N": self.N}

    @classmethod
    def from_dict(cls, data: dict, N: int | None = None) -> BathSpec:
        if not isinstance(data, dict):
            raise ValidationError("bath must be a JSON object")
        spec = dict(data)
        n = spec.pop("N", None)
        if N is not None:
            n = N
        if n is None:
            raise ValidationError("bath needs 'N'")
        return cls(Spectrum.from_dict(spec), int(n))


def qubit_bath(N: int, e0=0, e1=1) -> BathSpec:
    return BathSpec(Spectrum.of([e0, e1]), N)


# -- integer grid ------------------------------------------------------------

@dataclass(frozen=True)
class _Grid:
    """Integer view of a bath: unit energies ``k_j`` and the unit ``scale``."""

    base: Fraction
    scale: int
    steps: tuple[int, ...]

    def to_int(self, N: int, energy: Fraction) -> int | None:
        x = (energy - N * self.base) * self.scale
        if x.denominator != 1 or x < 0:
            return None
        return int(x)

    def to_energy(self, N: int, k: int) -> Fraction:
        return N * self.base + Fraction(k, self.scale)


def _grid(unit: Spectrum, *extra: Fraction) -> _Grid:
    base = unit.levels[0].energy
    scale = math.lcm(*(e.denominator for e in unit.energies), *(Fraction(x).denominator for x in extra))
    steps = tuple(int((e - base) * scale) for e in unit.energies)
    return _Grid(base, scale, steps)


# -- occupations -------------------------------------------------------------

def _occupations(steps: Sequence[int], N: int, target: int) -> Iterator[tuple[int, ...]]:
    """Vectors with sum N and sum n_j k_j == target, descending lexicographic."""
    m = len(steps)

    def rec(j: int, left: int, energy: int, prefix: tuple[int, ...]):
        if j == m - 1:
            if left * steps[j] == energy:
                yield prefix + (left,)
            return
        rest = steps[j + 1:]
        lo, hi = min(rest), max(rest)
        for n in range(left, -1, -1):
            e = energy - n * steps[j]
            if e < 0:
                continue
            rem = left - n
            if rem * lo <= e <= rem * hi:
                yield from rec(j + 1, rem, e, prefix + (n,))

    yield from rec(0, N, target, ())


def enumerate_occupations(bath: BathSpec, E_B) -> list[tuple[int, ...]]:
    """All ``(n_1, ..., n_m)`` with ``sum n_j = N`` and ``sum n_j e_j = E_B``.

    Ordered descending lexicographically; empty when ``E_B`` is unreachable.
    """
    E_B = to_fraction(E_B)
    g = _grid(bath.unit, E_B)
    t = g.to_int(bath.N, E_B)
    if t is None:
        return []
    return list(_occupations(g.steps, bath.N, t))


def multinomial(occ: Sequence[int]) -> int:
    """``N! / (n_1! ... n_m!)`` exactly, ``N = sum(occ)``."""
    if any(n < 0 for n in occ):
        raise ValidationError("occupation numbers must be non-negative")
    total, out = 0, 1
    for n in occ:
        total += n
        out *= math.comb(total, n)
    return out


def degeneracy_table(bath: BathSpec) -> dict[Fraction, int]:
    """Exact bath degeneracy at every reachable total energy.

    Unit-by-unit dynamic programming over the integer energy grid: the table
    after ``i`` units is the convolution of the table after ``i - 1`` units with
    the single-unit level weights.
    """
    g = _grid(bath.unit)
    return {g.to_energy(bath.N, k): c for k, c in enumerate(_dp(g.steps, bath.unit.degeneracies, bath.N)) if c}


def _dp(steps: Sequence[int], degs: Sequence[int], N: int, cap: int | None = None) -> list[int]:
    top = max(steps)
    width = N * top + 1 if cap is None else min(N * top, cap) + 1
    table = [0] * width
    table[0] = 1
    hi = 0
    for _ in range(N):
        new_hi = min(hi + top, width - 1)
        nxt = [0] * width
        for e in range(hi + 1):
            c = table[e]
            if not c:
                continue
            for k, d in zip(steps, degs):
                if e + k <= new_hi:
                    nxt[e + k] += c * d
        table, hi = nxt, new_hi
    return table


def bath_degeneracy(bath: BathSpec, E_B) -> int:
    """Number of bath eigenstates with total energy ``E_B``.

    Equals ``sum over occupations of multinomial(occ) * prod g_j^{n_j}``; for a
    qubit bath this is the binomial ``C(N, n)``.
    """
    E_B = to_fraction(E_B)
    g = _grid(bath.unit, E_B)
    t = g.to_int(bath.N, E_B)
    if t is None or t > bath.N * max(g.steps):
        return 0
    return _dp(g.steps, bath.unit.degeneracies, bath.N, cap=t)[t]


def count_from_occupations(bath: BathSpec, E_B) -> int:
    """Same quantity as :func:`bath_degeneracy`, summed over occupation vectors."""
    degs = bath.unit.degeneracies
    return sum(multinomial(o) * math.prod(d**n for d, n in zip(degs, o)) for o in enumerate_occupations(bath, E_B))


def reachable_neighbours(bath: BathSpec, E_B) -> tuple[Fraction | None, Fraction | None]:
    """Nearest reachable bath energies strictly below and above ``E_B``.

    Scans the integer grid outward and stops at the first energy that has an
    occupation vector, so large baths never need the full table.
    """
    E_B = to_fraction(E_B)
    g = _grid(bath.unit, E_B)
    t = g.to_int(bath.N, E_B)
    top = bath.N * max(g.steps)

    def scan(ks):
        for k in ks:
            if next(_occupations(g.steps, bath.N, k), None) is not None:
                return g.to_energy(bath.N, k)
        return None

    if t is None:
        t = -1 if E_B < bath.N * g.base else top + 1
    return scan(range(min(t, top + 1) - 1, -1, -1)), scan(range(max(t, -1) + 1, top + 1))


# -- brute force oracle ------------------------------------------------------

def _check_guard(bath: BathSpec, guard: int) -> None:
    size = (bath.unit.m * max(bath.unit.degeneracies)) ** bath.N
    if size > guard:
        raise GuardExceeded(f"configuration space ~{size} exceeds brute-force guard {guard}")


def _half_histogram(unit_energies: Sequence[int], n: int) -> Counter:
    hist: Counter = Counter()
    for config in itertools.product(unit_energies, repeat=n):
        hist[sum(config)] += 1
    return hist


def brute_force_table(bath: BathSpec, guard: int = BRUTE_FORCE_GUARD) -> dict[Fraction, int]:
    """Count every unit-state assignment, histogrammed by total energy.

    Each unit independently takes one of its ``sum_j g_j`` eigenstates. The
    ``N`` units are split into two halves whose assignments are listed
    explicitly; every pair (left, right) is one full assignment, so the joint
    histogram is the pair count over matching energies.
    """
    _check_guard(bath, guard)
    den = math.lcm(*(e.denominator for e in bath.unit.energies))
    states = [int(lv.energy * den) for lv in bath.unit.levels for _ in range(lv.degeneracy)]
    left_n = bath.N // 2
    left = _half_histogram(states, left_n)
    right = left if bath.N - left_n == left_n else _half_histogram(states, bath.N - left_n)
    out: Counter = Counter()
    for el, cl in left.items():
        for er, cr in right.items():
            out[el + er] += cl * cr
    return {Fraction(e, den): c for e, c in out.items()}


def brute_force_count(bath: BathSpec, E_B, guard: int = BRUTE_FORCE_GUARD) -> int:
    """Exhaustive count of bath eigenstates at ``E_B``.

    Raises
    ------
    GuardExceeded
        When ``(m * max_degeneracy) ** N > guard``.
    """
    return brute_force_table(bath, guard).get(to_fraction(E_B), 0)


# -- accessibility -----------------------------------------------------------

def _shells(system_shells: Mapping) -> dict[Fraction, int]:
    out: dict[Fraction, int] = {}
    for e, size in system_shells.items():
        e = to_fraction(e)
        out[e] = out.get(e, 0) + int(size)
    return out


def total_accessible(system_shells: Mapping, bath: BathSpec, E_total) -> int:
    """``N_S(E) = sum_e shell(e) * N_B(E - e)``: all composite states at ``E``."""
    E_total = to_fraction(E_total)
    table = degeneracy_table(bath)
    return sum(size * table.get(E_total - e, 0) for e, size in _shells(system_shells).items())


def accessible_count(bath: BathSpec, E_total, e_k) -> int:
    """Bath states compatible with the system sitting at ``e_k``: ``N_B(E - e_k)``."""
    return bath_degeneracy(bath, to_fraction(E_total) - to_fraction(e_k))


def accessibility_ratio(system_shells: Mapping, bath: BathSpec, E_total, e_k) -> Fraction:
    """``N_B(E_total - e_k) / N_S(E_total)`` as an exact rational.

    ``system_shells`` maps each system energy to the size of its degenerate
    shell. Summing ``shell(e) * ratio(e)`` over the system spectrum gives 1.
    """
    E_total, e_k = to_fraction(E_total), to_fraction(e_k)
    table = degeneracy_table(bath)
    denom = sum(size * table.get(E_total - e, 0) for e, size in _shells(system_shells).items())
    if denom == 0:
        raise ZeroDivisionError(f"no composite state has total energy {E_total}")
    return Fraction(table.get(E_total - e_k, 0), denom)


# -- logarithms --------------------------------------------------------------

def log_count_stirling(occ: Sequence[int]) -> float:
    """Leading-order Stirling estimate ``N ln N - sum n_j ln n_j``."""
    n_tot = sum(occ)
    return _xlogx(n_tot) - sum(_xlogx(n) for n in occ)


def _xlogx(n: float) -> float:
    return n * math.log(n) if n > 0 else 0.0


def log_multinomial(occ: Sequence[int]) -> float:
    """``ln(N! / prod n_j!)`` through the log-gamma function."""
    return math.lgamma(sum(occ) + 1) - sum(math.lgamma(n + 1) for n in occ)


def tagged_unit_counts(bath: BathSpec, E_B) -> list[int]:
    """Bath eigenstates at ``E_B`` with one fixed unit in level ``j``, per ``j``.

    Equals ``g_j * N_B^{(N-1)}(E_B - e_j)`` and sums to ``bath_degeneracy``;
    ``N * counts[j] / total`` is the exact mean occupation of level ``j``.
    """
    E_B = to_fraction(E_B)
    if bath.N == 1:
        return [lv.degeneracy if lv.energy == E_B else 0 for lv in bath.unit.levels]
    rest = BathSpec(bath.unit, bath.N - 1)
    return [lv.degeneracy * bath_degeneracy(rest, E_B - lv.energy) for lv in bath.unit.levels]
