"""Atomic reference data for the Rb-87 D1 line.

These are external atomic constants, kept out of the physics code so a
different species or line can be swapped in from one place.
"""

import numpy as np

# Rb-87 D1 (5S1/2 -> 5P1/2) vacuum wavelength [m]
RB87_D1_WAVELENGTH = 794.98e-9

# Radiative decay rate of the excited state on the D1 line [1/s]
# (natural linewidth 2*pi*5.746 MHz)
RB87_D1_GAMMA_R = 3.61e7

# Homogeneous optical coherence decay in a warm buffer-gas cell [1/s]
RB87_GAMMA_HOMOGENEOUS = 2.0e7

# Doppler width of the optical line at cell temperature [rad/s]
RB87_DOPPLER_WIDTH = 2 * np.pi * 500e6
