"""
Boltzmann-Gibbs occupations from counting
=========================================

Maximize the Stirling log-count of a bath at fixed unit number and energy.
The result is exponential in the level energy. The exact argmax over integer
occupation vectors usually sits next to the rounded continuous answer.
"""
import numpy as np

from envstat import BathSpec, Spectrum, argmax_occupation, solve_boltzmann_gibbs, zeroth_law_check

two = Spectrum.of([0, 1])
sol = solve_boltzmann_gibbs(two, 100, 30)
print(f"lambda = {sol.lam:.6f}  (ln 3/7 = {np.log(3 / 7):.6f}), mu = {sol.mu:.3f}")
print("occupations:", sol.occupations)
print("argmax:", argmax_occupation(BathSpec(two, 100), 30).occupation)

# %%
# Three levels at a quarter filling: e^lambda solves 3x^2 + x - 1 = 0.
three = Spectrum.of([0, 1, 2])
sol = solve_boltzmann_gibbs(three, 300, 150)
print("e^lambda =", np.exp(sol.lam), " root =", (-1 + np.sqrt(13)) / 6)

# %%
# Close to the ground state the discrete optimum can move away from tiny
# occupations: compare the two at E_B = 10 for 100 units.
cont = solve_boltzmann_gibbs(three, 100, 10).occupations
best = argmax_occupation(BathSpec(three, 100), 10)
print("continuous:", np.round(cont, 2), " discrete argmax:", best.occupation)

# %%
# Two small systems drawing different energies from one large bath see
# almost the same multiplier, and the difference falls like 1/N.
for N in (10**3, 10**4, 10**5):
    rep = zeroth_law_check(two, N, 3 * N // 10, 0, 1)
    print(f"N={N:>6}: |lambda1 - lambda2| = {rep.difference:.3e}")
