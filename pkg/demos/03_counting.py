"""
Counting bath states exactly
============================

For N identical units with a few levels each, the number of bath eigenstates
at a total energy is a sum of multinomials. Two independent routes give the
same big integers: a level-by-level convolution and explicit enumeration.
"""
import math

from envstat import (
    BathSpec,
    Spectrum,
    accessibility_ratio,
    bath_degeneracy,
    brute_force_count,
    degeneracy_table,
    enumerate_occupations,
    log_count_stirling,
    qubit_bath,
)

# %%
# Four qubits with total energy 2: six bit strings of weight two.
bath = qubit_bath(4)
print("occupations:", enumerate_occupations(bath, 2))
print("count:", bath_degeneracy(bath, 2), "brute force:", brute_force_count(bath, 2))
print("table:", {str(e): c for e, c in degeneracy_table(bath).items()})

# %%
# Rational energies and degenerate levels work the same way.
bath = BathSpec(Spectrum.of(["0", "1/2", "2"], [1, 2, 1]), 8)
print("N_B(4) =", bath_degeneracy(bath, 4), "=", brute_force_count(bath, 4))

# %%
# A qubit system sharing energy 2 with the four-qubit bath: which fraction of
# the joint states leaves the qubit in its ground level?
print("fraction with e_S = 0:", accessibility_ratio({0: 1, 1: 1}, qubit_bath(4), 2, 0))

# %%
# Large baths: the counts become huge but stay exact, and the Stirling
# log-count approaches the exact logarithm slowly.
c = bath_degeneracy(qubit_bath(1000), 500)
print("digits of N_B:", len(str(c)))
print("ln exact:", math.log(c), " Stirling:", log_count_stirling((500, 500)))
