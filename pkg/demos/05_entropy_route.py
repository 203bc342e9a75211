"""
Temperature from the entropy of the bath
========================================

The same canonical weights follow from the Boltzmann entropy of the bath.
Its slope in energy gives 1/T, which agrees with -lambda up to O(1/N).
When system and bath are correlated the weight picks up a factor exp(-D).
"""
import math

import numpy as np

from envstat import (
    PureState,
    Spectrum,
    bath_inverse_temperature,
    generalized_canonical_weight,
    mutual_info_identity_check,
    qubit_bath,
    solve_boltzmann_gibbs,
    thermo_report,
)

for N in (100, 1000, 10000):
    beta = bath_inverse_temperature(qubit_bath(N), 3 * N // 10).beta
    lam = solve_boltzmann_gibbs(Spectrum.of([0, 1]), N, 3 * N // 10).lam
    print(f"N={N:>5}: 1/T = {beta:.6f}, -lambda = {-lam:.6f}")

# %%
# Weights of a qubit system against 100 qubits, compared with the exact
# ratio of bath counts 30/71.
rep = thermo_report(Spectrum.of([0, 1]), qubit_bath(100), 30)
w = rep.weights
print("w(1)/w(0) =", w[1] / w[0], " exact:", 30 / 71)

# %%
# A Bell pair shared between the two halves of the system, each half also
# maximally mixed with the environment. D = 2 ln 2 and the joint count is a
# quarter of the product of the marginal counts.
a, c = 2, 3
t = np.einsum("pq,xy,zw->pxqzyw", np.eye(2) / math.sqrt(2), np.eye(a) / math.sqrt(a), np.eye(c) / math.sqrt(c))
psi = PureState.from_amplitudes(4 * a * c, a * c, t.reshape(-1))
mi = mutual_info_identity_check(psi, 2 * a, 2 * c, a * c, split=(2 * a, 2 * c))
print(mi.to_dict())
print("suppression of the weight:", generalized_canonical_weight(0, 0.0, 1.0, D=mi.D))
