"""Atomic species data. Defaults are the 87Rb D2-line values."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AtomicSpecies:
    """Two ground states |a>, |b>, intermediate |e>, Rydberg |r>.

    All frequencies are angular (rad/s).
    """

    mass: float = 1.443e-25                        # kg
    linewidth_Gamma: float = 2 * np.pi * 6.07e6    # rad/s
    saturation_intensity: float = 16.7             # W/m^2
    line_wavelength: float = 780e-9                # m
    ground_hyperfine_splitting: float = 2 * np.pi * 6.8e9   # rad/s, w_eb - w_ea
    rydberg_decay_gamma_R: float = 2 * np.pi * 1e3          # rad/s

    def __post_init__(self):
        for name in ("mass", "linewidth_Gamma", "saturation_intensity",
                     "line_wavelength", "ground_hyperfine_splitting",
                     "rydberg_decay_gamma_R"):
            if not getattr(self, name) > 0:
                raise ValueError("%s must be strictly positive" % name)


RB87 = AtomicSpecies()
