"""Physical and analytic constants (natural units, m = c = hbar = 1)."""

import math

ALPHA_FS = 1.0 / 137.035999084

GAMMA_H = 2.0
GAMMA_K = math.pi / 2.0
GAMMA_T = 0.5 * (math.pi / 2.0 + 2.0 / math.pi)

# Potential at a lattice site of a simple cubic lattice of unit charges in a
# neutralizing background, self term removed, times the lattice constant.
MADELUNG_SC = 2.837297479480620

Z_MIN_EXISTENCE = 5
Z_MAX_EXISTENCE = 123
