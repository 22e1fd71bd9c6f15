"""Atom cloud sampling and pairwise Rydberg dipole-dipole shifts.

Pair shifts follow the parallel-aligned dipole form
Delta_jk = -f(n) e^2 a0^2 / (4 pi eps0 hbar |r_j - r_k|^3)  [rad/s]
with f(n) = f_coefficient * n^6 calibrated from a single anchor point
(by default n = 50 and 5 um separation giving |Delta|/2pi = 100 MHz).
The ensemble blockade scale is the harmonic mean of |Delta_jk| over all
pairs.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.constants import hbar, epsilon_0, e as _e_charge, physical_constants

from .species import AtomicSpecies, RB87

_A0 = physical_constants["Bohr radius"][0]
# e^2 a0^2 / (4 pi eps0), J m^3; multiplies f(n)/r^3
_SHIFT_PREFACTOR = _e_charge ** 2 / (4 * np.pi * epsilon_0) * _A0 ** 2

DEFAULT_ANCHOR_SEPARATION = 5e-6                 # m
DEFAULT_ANCHOR_SHIFT = 2 * np.pi * 100e6         # rad/s (magnitude)
MIN_PAIR_SEPARATION = 10e-9                      # m, sampling floor
_MAX_SAMPLING_ATTEMPTS = 10 ** 6


class SamplingError(RuntimeError):
    """Cloud sampling could not satisfy the separation constraint."""


@dataclass(frozen=True)
class RydbergCoupling:
    """van der Waals-style pair coupling, f(n) = f_coefficient * n^6."""

    principal_n: int
    f_coefficient: float
    calibration_anchor: tuple = (DEFAULT_ANCHOR_SEPARATION,
                                 DEFAULT_ANCHOR_SHIFT)

    def __post_init__(self):
        if self.principal_n < 1:
            raise ValueError("principal_n must be >= 1")
        if not self.f_coefficient > 0:
            raise ValueError("f_coefficient must be positive")
        if self.calibration_anchor is not None:
            sep, shift = self.calibration_anchor
            got = abs(self.shift_at(sep))
            if abs(got - shift) > 1e-10 * shift:
                raise ValueError(
                    "calibration anchor not reproduced: got %.6e, want %.6e"
                    % (got, shift))

    @property
    def f_of_n(self):
        return self.f_coefficient * self.principal_n ** 6

    def shift_at(self, separation):
        """Signed pair shift (rad/s) at a scalar separation (m)."""
        return -self.f_of_n * _SHIFT_PREFACTOR / (hbar * separation ** 3)

    @classmethod
    def calibrated(cls, principal_n, anchor_separation=DEFAULT_ANCHOR_SEPARATION,
                   anchor_shift=DEFAULT_ANCHOR_SHIFT):
        """Fix f_coefficient so |shift| at the anchor separation matches."""
        f_of_n = hbar * anchor_shift * anchor_separation ** 3 / _SHIFT_PREFACTOR
        return cls(principal_n=principal_n,
                   f_coefficient=f_of_n / principal_n ** 6,
                   calibration_anchor=(anchor_separation, anchor_shift))


@dataclass(frozen=True)
class AtomCloud:
    """Sampled positions (N, 3) in a sphere of the stated diameter."""

    positions: np.ndarray
    diameter: float
    master_seed: int
    species: AtomicSpecies = RB87

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "positions", pos)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError("positions must have shape (N >= 1, 3)")
        r = np.linalg.norm(pos, axis=1)
        if np.any(r > self.diameter / 2 * (1 + 1e-12)):
            raise ValueError("positions outside the stated sphere")
        if pos.shape[0] > 1:
            if len(np.unique(pos, axis=0)) != pos.shape[0]:
                raise ValueError("duplicate atom positions")

    @property
    def n_atoms(self):
        return self.positions.shape[0]

    def pair_indices(self):
        """Lexicographic (j, k) pair order, j < k."""
        return list(combinations(range(self.n_atoms), 2))


def sample_cloud(N, diameter, seed, species=RB87,
                 min_separation=MIN_PAIR_SEPARATION):
    """Sample N atoms i.i.d. uniform in a ball, min pair separation enforced.

    Deterministic for a fixed seed. Points closer than `min_separation`
    to an accepted point are resampled; after 1e6 attempts a
    SamplingError signals that the ball is too small for N.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if not diameter > 0:
        raise ValueError("diameter must be positive")
    rng = np.random.default_rng(seed)
    radius = diameter / 2
    accepted = np.empty((N, 3))
    count = 0
    attempts = 0
    while count < N:
        attempts += 1
        if attempts > _MAX_SAMPLING_ATTEMPTS:
            raise SamplingError(
                "failed to place %d atoms with %.1e m separation in a "
                "%.1e m sphere after %d attempts"
                % (N, min_separation, diameter, _MAX_SAMPLING_ATTEMPTS))
        p = rng.uniform(-radius, radius, size=3)
        if p @ p > radius * radius:
            continue
        if count and min_separation > 0:
            d2 = np.sum((accepted[:count] - p) ** 2, axis=1)
            if np.min(d2) < min_separation ** 2:
                continue
        accepted[count] = p
        count += 1
    return AtomCloud(positions=accepted, diameter=diameter,
                     master_seed=int(seed), species=species)


def pair_shift(coupling, r_j, r_k):
    """Signed dipole-dipole shift (rad/s) for one atom pair."""
    r_j = np.asarray(r_j, dtype=float)
    r_k = np.asarray(r_k, dtype=float)
    sep = np.linalg.norm(r_j - r_k)
    if sep == 0:
        raise ValueError("zero separation between atoms")
    return coupling.shift_at(sep)


def pair_shift_magnitudes(cloud, coupling):
    """|Delta_jk| (rad/s) for every pair, lexicographic order."""
    from scipy.spatial.distance import pdist
    seps = pdist(cloud.positions)     # lexicographic pair order
    if np.any(seps == 0):
        raise ValueError("zero separation between atoms")
    return np.abs(coupling.f_of_n * _SHIFT_PREFACTOR / (hbar * seps ** 3))


def mean_blockade_shift(cloud, coupling):
    """Harmonic mean of |Delta_jk| over all pairs (rad/s, positive)."""
    if cloud.n_atoms < 2:
        raise ValueError("mean blockade shift needs at least 2 atoms")
    mags = pair_shift_magnitudes(cloud, coupling)
    return len(mags) / np.sum(1.0 / mags)
