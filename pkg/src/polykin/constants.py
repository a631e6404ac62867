"""Physical constants and unit-mode helpers."""

# Boltzmann constant [J/K], 2019 SI exact value.
K_B = 1.380649e-23

# Nondimensional mode uses m = 1 and k_B = 1; functions that need k_B take it
# as a keyword defaulting to the SI value so callers can pass 1.0 instead.
K_B_NONDIM = 1.0
