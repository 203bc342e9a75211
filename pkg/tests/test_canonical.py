import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from envstat.canonical import (
    DegenerateError,
    InfeasibleError,
    argmax_occupation,
    kkt_spread,
    mean_energy,
    rounded_occupations,
    solve_boltzmann_gibbs,
    zeroth_law_check,
)
from envstat.counting import BathSpec, GuardExceeded, Spectrum, degeneracy_table, enumerate_occupations, multinomial, qubit_bath

TWO = Spectrum.of([0, 1])
THREE = Spectrum.of([0, 1, 2])


def bisect_lambda(energies, target, lo=-60.0, hi=60.0):
    """Plain bisection on the mean-energy equation, no Newton."""
    e = np.asarray(energies, dtype=float)

    def mean(lam):
        w = np.exp(lam * e - np.max(lam * e))
        return (w @ e) / w.sum()

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mean(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_two_level_closed_form():
    sol = solve_boltzmann_gibbs(TWO, 100, 30)
    assert sol.lam == pytest.approx(math.log(3 / 7), abs=1e-10)
    assert sol.lam == pytest.approx(-0.84730, abs=1e-5)
    assert sol.lam == pytest.approx(bisect_lambda([0, 1], 0.3), abs=1e-10)
    assert sol.mu == pytest.approx(70, rel=1e-10)
    np.testing.assert_allclose(sol.occupations, [70, 30], rtol=1e-10)


def test_symmetric_energy_gives_zero_multiplier():
    sol = solve_boltzmann_gibbs(THREE, 300, 300)
    assert abs(sol.lam) <= 1e-12
    np.testing.assert_allclose(sol.occupations, [100, 100, 100], rtol=1e-10)


def test_three_level_quadratic_root():
    sol = solve_boltzmann_gibbs(THREE, 300, 150)
    x = (-1 + math.sqrt(13)) / 6
    assert 3 * x * x + x - 1 == pytest.approx(0, abs=1e-15)
    assert math.exp(sol.lam) == pytest.approx(x, abs=1e-10)
    assert sol.lam == pytest.approx(-0.834115, abs=1e-6)
    assert sol.mu == pytest.approx(300 / (1 + x + x * x), rel=1e-10)
    assert sol.mu == pytest.approx(184.86, abs=1e-2)


@pytest.mark.parametrize("E_B", [0, 100, -3, 101])
def test_infeasible_and_degenerate(E_B):
    with pytest.raises(InfeasibleError):
        solve_boltzmann_gibbs(TWO, 100, E_B)


def test_degenerate_names_level():
    with pytest.raises(DegenerateError, match="degenerate boundary.*level 0"):
        solve_boltzmann_gibbs(THREE, 10, 0)
    with pytest.raises(DegenerateError, match="level 2"):
        solve_boltzmann_gibbs(THREE, 10, 20)


spectra = st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6), min_size=2, max_size=4, unique=True)


@settings(max_examples=80, deadline=None)
@given(spectra, st.integers(2, 10**5), st.floats(0.01, 0.99))
def test_solution_invariants(energies, N, frac):
    spec = Spectrum.of(sorted(energies))
    lo, hi = N * spec.energies[0], N * spec.energies[-1]
    E_B = lo + Fraction(frac).limit_denominator(1000) * (hi - lo)
    sol = solve_boltzmann_gibbs(spec, N, E_B)
    e = np.array([float(v) for v in spec.energies])
    assert np.all(sol.occupations > 0)
    assert abs(sol.occupations.sum() - N) / N <= 1e-10
    assert abs(sol.occupations @ e - float(E_B)) / max(abs(float(E_B)), 1.0) <= 1e-8
    assert sol.count_residual <= 1e-10
    assert kkt_spread(sol, spec) <= 1e-8
    assert sol.lam == pytest.approx(bisect_lambda(e, float(E_B) / N), abs=1e-7)


@pytest.mark.parametrize("energies", [[0, 1], [0, 1, 2], [0, 1, 3], ["-2", "1/3", "5/2", 4]])
def test_mean_energy_monotone(energies):
    # beyond |lam| ~ 10 the mean saturates in double precision
    grid = np.linspace(-10, 10, 2001)
    m = np.array([mean_energy(lam, [float(Fraction(v)) for v in energies]) for lam in grid])
    assert np.all(np.diff(m) > 0)


@pytest.mark.parametrize("c", [Fraction(-7, 3), Fraction(5)])
def test_shift_covariance(c):
    base = solve_boltzmann_gibbs(THREE, 50, 40)
    shifted = solve_boltzmann_gibbs(Spectrum.of([v + c for v in THREE.energies]), 50, 40 + 50 * c)
    assert shifted.lam == pytest.approx(base.lam, abs=1e-10)
    np.testing.assert_allclose(shifted.occupations, base.occupations, rtol=1e-9)


@pytest.mark.parametrize("s", [Fraction(1, 4), Fraction(3)])
def test_scale_covariance(s):
    base = solve_boltzmann_gibbs(THREE, 50, 40)
    scaled = solve_boltzmann_gibbs(Spectrum.of([v * s for v in THREE.energies]), 50, 40 * s)
    assert scaled.lam == pytest.approx(base.lam / float(s), rel=1e-10)


def test_argmax_examples():
    r = argmax_occupation(qubit_bath(4), 2)
    assert r.occupation == (2, 2) and r.count == 6 and r.n_feasible == 1
    r = argmax_occupation(qubit_bath(100), 30)
    assert r.occupation == (70, 30) and r.count == math.comb(100, 30)
    assert not r.tied


def test_argmax_twelve_units():
    bath = BathSpec(THREE, 12)
    r = argmax_occupation(bath, 12)
    brute = max(enumerate_occupations(bath, 12), key=multinomial)
    assert multinomial(brute) == r.count
    cont = rounded_occupations(solve_boltzmann_gibbs(THREE, 12, 12))
    assert np.max(np.abs(np.array(r.occupation) - cont)) <= 1


def test_argmax_tie_is_lexicographic():
    # two units at E=3 on {0,1,2,3}: (1,0,0,1) and (0,1,1,0) both count 2
    r = argmax_occupation(BathSpec(Spectrum.of([0, 1, 2, 3]), 2), 3)
    assert r.tied and r.count == 2
    assert r.occupation == (0, 1, 1, 0)


def test_argmax_errors():
    with pytest.raises(InfeasibleError):
        argmax_occupation(qubit_bath(4), 9)
    with pytest.raises(GuardExceeded):
        argmax_occupation(BathSpec(THREE, 200), 200, guard=10)


@pytest.mark.parametrize("energies", [[0, 1], [0, 1, 2], [0, 1, 3]])
@pytest.mark.parametrize("N", [5, 9])
def test_count_dominance(energies, N):
    bath = BathSpec(Spectrum.of(energies), N)
    for E in degeneracy_table(bath):
        r = argmax_occupation(bath, E)
        assert all(multinomial(o) <= r.count for o in enumerate_occupations(bath, E))


@pytest.mark.parametrize("energies", [[0, 1], [0, 1, 2]])
@pytest.mark.parametrize("N", [50, 100])
def test_discrete_continuous_agreement(energies, N):
    spec = Spectrum.of(energies)
    bath = BathSpec(spec, N)
    bad = []
    for E in sorted(degeneracy_table(bath)):
        try:
            cont = rounded_occupations(solve_boltzmann_gibbs(spec, N, E))
        except DegenerateError:
            continue
        occ = np.array(argmax_occupation(bath, E).occupation)
        if np.max(np.abs(occ - cont)) > 1:
            bad.append((E, tuple(occ), tuple(cont)))
    assert not bad


def test_zeroth_law_examples():
    same = zeroth_law_check(TWO, 100, 30, 1, 1)
    assert same.lambda1 == same.lambda2 and same.difference == 0
    rep = zeroth_law_check(TWO, 10**4, 3000, 0, 1)
    assert rep.difference <= 1e-3
    big = zeroth_law_check(TWO, 10**5, 30000, 0, 1)
    assert rep.difference / big.difference == pytest.approx(10, rel=0.05)
    # two-level closed form lam = ln(E/(N-E))
    assert rep.lambda1 == pytest.approx(math.log(3000 / 7000), abs=1e-10)
    assert rep.lambda2 == pytest.approx(math.log(2999 / 7001), abs=1e-10)
    with pytest.raises(InfeasibleError):
        zeroth_law_check(TWO, 10, 1, 0, 1)


def test_solution_json():
    d = solve_boltzmann_gibbs(TWO, 100, 30).to_dict()
    assert set(d) == {"lambda", "mu", "occupations", "residuals"}
    assert set(d["residuals"]) == {"count", "mean_energy"}
