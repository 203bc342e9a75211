"""
Undoing a system unitary from the environment
=============================================

A unitary on the system alone is envariant when some unitary on the
environment puts the joint state back. For a maximally entangled pair the
swap of the two system levels can always be undone this way; for uneven
Schmidt weights it cannot.
"""
import numpy as np

from envstat import apply_local, bell_state, equiprobability, fidelity, is_envariant, state_from_schmidt, swap_unitary

# %%
# The Bell-type state (|00> + |11>)/sqrt(2) and the spin swap on the system.
psi = bell_state()
v = is_envariant(psi, swap_unitary())
print("envariant:", v.envariant, " residual:", v.residual)
print("environment witness:\n", np.round(v.witness.entries.real, 12) + 0.0)

# %%
# Applying the swap and then the witness returns the original state.
back = apply_local(apply_local(psi, swap_unitary(), "S"), v.witness, "E")
print("fidelity after swap + witness:", fidelity(back, psi))

# %%
# Envariance under every swap pins the Schmidt probabilities to be equal.
print("probabilities:", equiprobability(psi).probabilities)

# %%
# With weights 0.7 and 0.3 the swap changes the system marginal, so no
# environment operation can repair it.
uneven = state_from_schmidt([np.sqrt(0.7), np.sqrt(0.3)])
v = is_envariant(uneven, swap_unitary())
print("uneven state envariant:", v.envariant, f"({v.reason}, mismatch {v.marginal_mismatch:.2f})")
