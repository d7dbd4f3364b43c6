"""Physical constants used throughout the physics layer.

Values are deliberately the rounded ones common in the statistical-mechanics
literature (not CODATA), so that published reference numbers are reproduced
digit for digit.
"""

PLANCK_H = 6.626e-34       # J*s
BOLTZMANN_KB = 1.38e-23    # J/K

LN2 = 0.6931471805599453
