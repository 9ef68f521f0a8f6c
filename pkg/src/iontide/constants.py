"""Pinned physical constants (CODATA 2018) shared by every module.

The values are written out rather than imported from ``scipy.constants`` so
that results stay bit-reproducible across library versions.
"""

import math

HBAR = 1.054571817e-34  # J s
ELEMENTARY_CHARGE = 1.602176634e-19  # C
EPSILON_0 = 8.8541878128e-12  # F/m
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg
ELECTRON_MASS = 9.1093837015e-31  # kg

# Neutral 40Ca atomic mass (AME2016).  The ion mass subtracts one electron;
# the binding energy of the removed electron (6 eV) is far below float noise.
CA40_ATOMIC_MASS_U = 39.962590863
CA40_ION_MASS = CA40_ATOMIC_MASS_U * ATOMIC_MASS_UNIT - ELECTRON_MASS

TWO_PI = 2.0 * math.pi
EV = ELEMENTARY_CHARGE  # J per eV
