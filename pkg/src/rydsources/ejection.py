"""Classical state-selective ejection trajectories from the FORT.

An atom in |b> rides the repulsive eject-beam gradient out of the trap;
the characteristic timescale t1 solves (1/2) a t1^2 = w_FORT with a the
net acceleration at the cloud center. Trajectories integrate
m r'' = F_state(r), optionally with stochastic single-photon recoil
kicks sampled at the local scattering rate (thinning against the peak
rate), and accumulate the expected photon number along the path.
"""

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k as k_B
from scipy.integrate import solve_ivp

from .species import RB87

_G = 9.80665          # m/s^2, standard gravity along -z when enabled


class NotEjectedError(ValueError):
    """Nonpositive net acceleration: the atom is not ejected."""


class NoEscapeError(RuntimeError):
    """Statistics requested but no trajectory escaped."""


@dataclass(frozen=True)
class EjectConfig:
    eject_offset: np.ndarray = (-3e-6, 0.0, 0.0)   # m, eject beam center
    temperature: float = 30e-6                     # K
    duration: float = 300e-6                       # s
    tolerance: float = 1e-10
    include_recoil_kicks: bool = False
    gravity: bool = False
    fort_waist: float = 5e-6                       # m, sets escape radius
    trap_center: np.ndarray = (0.0, 0.0, 0.0)
    region_radius: float = 60e-6                   # m, field region bound

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        object.__setattr__(self, "eject_offset",
                           np.asarray(self.eject_offset, dtype=float))
        object.__setattr__(self, "trap_center",
                           np.asarray(self.trap_center, dtype=float))

    @property
    def escape_radius(self):
        return 3 * self.fort_waist


@dataclass
class TrajectoryResult:
    times: np.ndarray
    positions: np.ndarray               # (n, 3)
    velocities: np.ndarray              # (n, 3)
    photons_expected: np.ndarray        # running integral of the rate
    photons_sampled: int = None         # Poisson realization, kicks only
    escaped: bool = False               # |r - center| > 3 w_FORT, E > 0
    escape_time: float = None
    sweep_time: float = None            # first displacement > w_FORT
    exit_direction: np.ndarray = None
    truncated: bool = False             # left the field region early

    @property
    def total_photons_expected(self):
        return float(self.photons_expected[-1])

    def photons_expected_at(self, t):
        return float(np.interp(t, self.times, self.photons_expected))


def characteristic_eject_time(net_acceleration, w_fort):
    """t1 from (1/2) a t1^2 = w_FORT."""
    if not net_acceleration > 0:
        raise NotEjectedError("net acceleration %.3e m/s^2 is not positive; "
                              "atom is not ejected" % net_acceleration)
    return np.sqrt(2 * w_fort / net_acceleration)


def sample_thermal_initial(T, field_, state, N, seed, cloud_diameter,
                           species=RB87, center=(0.0, 0.0, 0.0)):
    """Maxwell-Boltzmann velocities at T, positions uniform in the cloud.

    Returns (positions (N, 3), velocities (N, 3)); deterministic under
    the seed. `field_` and `state` identify the ensemble being launched
    but do not affect the sampling.
    """
    del field_, state
    if T < 0:
        raise ValueError("temperature must be >= 0")
    rng = np.random.default_rng(seed)
    center = np.asarray(center, dtype=float)
    radius = cloud_diameter / 2
    positions = np.empty((N, 3))
    count = 0
    while count < N:
        p = rng.uniform(-radius, radius, size=3)
        if p @ p <= radius * radius:
            positions[count] = center + p
            count += 1
    sigma = np.sqrt(k_B * T / species.mass) if T > 0 else 0.0
    velocities = (rng.normal(0.0, sigma, size=(N, 3)) if sigma > 0
                  else np.zeros((N, 3)))
    return positions, velocities


def _rhs(field_, state, gravity, mass):
    def rhs(t, y):
        r, v = y[:3], y[3:6]
        a = field_.force(r, state) / mass
        if gravity:
            a = a + np.array([0.0, 0.0, -_G])
        rate = field_.total_scattering_rate(r, state)
        return np.concatenate([v, a, [rate]])
    return rhs


def _integrate_segment(field_, state, config, y0, t0, t1, events):
    sol = solve_ivp(_rhs(field_, state, config.gravity,
                         field_.species.mass),
                    (t0, t1), y0, method="DOP853",
                    rtol=config.tolerance, atol=config.tolerance * 1e-3,
                    events=events, dense_output=False, max_step=(t1 - t0))
    return sol


def simulate_trajectory(initial, field_, state, config, seed=None,
                        n_samples=400):
    """Integrate one atom; returns a TrajectoryResult.

    `initial` is (position, velocity). With recoil kicks enabled, a seed
    is required; each scattering event applies the absorbed-photon
    impulse along the eject-beam axis plus one isotropic emission kick
    of magnitude hbar k.
    """
    r0, v0 = (np.asarray(initial[0], dtype=float),
              np.asarray(initial[1], dtype=float))
    mass = field_.species.mass
    center = config.trap_center

    def region_event(t, y):
        return np.linalg.norm(y[:3] - center) - config.region_radius
    region_event.terminal = True
    region_event.direction = 1

    if config.include_recoil_kicks:
        if seed is None:
            raise ValueError("recoil kicks require a seed")
        times, states = _integrate_with_kicks(r0, v0, field_, state, config,
                                              seed, region_event)
    else:
        sol = _integrate_segment(field_, state, config,
                                 np.concatenate([r0, v0, [0.0]]),
                                 0.0, config.duration, [region_event])
        times, states = sol.t, sol.y.T

    # resample to a bounded number of output points (endpoints kept)
    if len(times) > n_samples:
        idx = np.unique(np.linspace(0, len(times) - 1,
                                    n_samples).astype(int))
        times, states = times[idx], states[idx]

    result = TrajectoryResult(
        times=np.asarray(times),
        positions=states[:, :3],
        velocities=states[:, 3:6],
        photons_expected=states[:, 6],
    )
    if config.include_recoil_kicks:
        result.photons_sampled = int(round(states[-1, 7]))
    result.truncated = (np.linalg.norm(states[-1, :3] - center)
                        >= config.region_radius * (1 - 1e-9))

    radii = np.linalg.norm(result.positions - center, axis=1)
    energies = (0.5 * mass * np.sum(result.velocities ** 2, axis=1)
                + np.array([field_.potential(p, state)
                            for p in result.positions]))
    outside = (radii > config.escape_radius) & (energies > 0)
    if np.any(outside):
        i = int(np.argmax(outside))
        result.escaped = True
        result.escape_time = float(result.times[i])
        v = result.velocities[i]
        result.exit_direction = v / np.linalg.norm(v)
    disp = np.linalg.norm(result.positions - r0, axis=1)
    swept = disp > config.fort_waist
    if np.any(swept):
        result.sweep_time = float(result.times[int(np.argmax(swept))])
    return result


def _integrate_with_kicks(r0, v0, field_, state, config, seed, region_event):
    """Inhomogeneous-Poisson kick sampling by thinning against a rate bound."""
    rng = np.random.default_rng(seed)
    # bound: peak intensity of every beam seen simultaneously
    from .optics import scattering_rate
    rate_bound = 1.2 * sum(
        scattering_rate(beam.peak_intensity, det.for_state(state),
                        field_.species)
        for beam, det in field_.beams)
    rate_bound = max(rate_bound, 1.0 / config.duration)
    mass = field_.species.mass
    # pick the dominant scattering beam for the absorbed-photon direction
    eject_beam = max(field_.beams, key=lambda bd: scattering_rate(
        bd[0].peak_intensity, bd[1].for_state(state), field_.species))[0]

    t = 0.0
    y = np.concatenate([r0, v0, [0.0]])
    times = [0.0]
    states = [np.concatenate([y, [0.0]])]
    kicks = 0
    while t < config.duration:
        tau = rng.exponential(1.0 / rate_bound)
        t_next = min(t + tau, config.duration)
        sol = _integrate_segment(field_, state, config, y, t, t_next,
                                 [region_event])
        for ts, ys in zip(sol.t[1:], sol.y.T[1:]):
            times.append(ts)
            states.append(np.concatenate([ys, [kicks]]))
        t = sol.t[-1]
        y = sol.y[:, -1]
        if sol.status == 1:        # left the region
            break
        if t >= config.duration:
            break
        local_rate = field_.total_scattering_rate(y[:3], state)
        if rng.uniform() < local_rate / rate_bound:
            kicks += 1
            hk = hbar * eject_beam.wavenumber / mass
            u = _isotropic_direction(rng)
            y[3:6] += hk * eject_beam.axis + hk * u
            states[-1][3:6] = y[3:6]
            states[-1][7] = kicks
    return np.array(times), np.array(states)


def _isotropic_direction(rng):
    z = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2 * np.pi)
    s = np.sqrt(1 - z * z)
    return np.array([s * np.cos(phi), s * np.sin(phi), z])


def collimation_stats(trajectories, coherent_acceleration, eject_time,
                      photon_wavelength, species=RB87):
    """Beam-quality metrics from an ensemble of trajectories.

    Returns (mean exit direction, rms transverse velocity spread,
    recoil-to-coherent impulse ratio). The impulse ratio is
    sqrt(n_scat) hbar k / (m a t1) with n_scat the mean expected photon
    number accumulated over the first t1 of flight.
    """
    escaped = [tr for tr in trajectories if tr.escaped]
    if not escaped:
        raise NoEscapeError("no escaped trajectories")
    dirs = np.array([tr.exit_direction for tr in escaped])
    mean_dir = dirs.mean(axis=0)
    mean_dir /= np.linalg.norm(mean_dir)
    exit_v = np.array([tr.velocities[-1] for tr in escaped])
    v_trans = exit_v - np.outer(exit_v @ mean_dir, mean_dir)
    rms_transverse = float(np.sqrt(np.mean(np.sum(v_trans ** 2, axis=1))))
    n_scat = float(np.mean([tr.photons_expected_at(eject_time)
                            for tr in trajectories]))
    coherent_impulse = species.mass * coherent_acceleration * eject_time
    ratio = (np.sqrt(n_scat) * 2 * np.pi * hbar / photon_wavelength
             / coherent_impulse)
    return mean_dir, rms_transverse, float(ratio)


def scan_fig2(field_, axis_start, axis_end, samples, species=RB87):
    """Potential/acceleration profile along the FORT-eject line.

    Returns a dict of arrays: x (m, signed along the line),
    U_a_over_kB_uK, U_b_over_kB_uK, a_a, a_b (signed projections on the
    line direction, m/s^2).
    """
    axis_start = np.asarray(axis_start, dtype=float)
    axis_end = np.asarray(axis_end, dtype=float)
    direction = axis_end - axis_start
    length = np.linalg.norm(direction)
    if length == 0:
        raise ValueError("degenerate scan axis")
    direction = direction / length
    x = np.linspace(0.0, length, samples)
    pts = axis_start[None, :] + x[:, None] * direction[None, :]
    out = {"x": x + 0.0}
    for state in ("a", "b"):
        U = np.array([field_.potential(p, state) for p in pts])
        acc = np.array([field_.acceleration(p, state) @ direction
                        for p in pts])
        out["U_%s_over_kB_uK" % state] = U / k_B * 1e6
        out["a_%s" % state] = acc
    return out
