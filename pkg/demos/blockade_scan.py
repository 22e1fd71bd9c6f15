"""Collective blockade dynamics: closed form vs the full integrator.

Samples uniform spherical clouds, computes the harmonic-mean pair shift,
the blockade-imperfection factor l, and the single/double excitation
probabilities after a collective pi pulse, then cross-checks the closed
forms against the truncated-basis Schrodinger integrator for small N.
"""

import numpy as np

from rydsources import (CollectiveState, PulseSpec, RydbergCoupling,
                        build_hamiltonian, evolve, l_factor,
                        mean_blockade_shift, p_double_estimate,
                        pi_pulse_time, sample_cloud)

TWO_PI = 2 * np.pi


def main():
    coupling = RydbergCoupling.calibrated(50)
    rabi = TWO_PI * 1e6                  # |Omega| / 2 pi = 1 MHz
    print("pair shift anchor: |Delta|/2pi = %.0f MHz at 5 um (n = 50)"
          % (abs(coupling.shift_at(5e-6)) / TWO_PI / 1e6))

    print("\nclosed-form scan, 5 um cloud, |Omega|/2pi = 1 MHz")
    print("%6s %14s %10s %12s %12s" % ("N", "Dbar/2pi (MHz)", "l - 1",
                                       "t_pi (ns)", "P_double"))
    for N in (2, 5, 10, 50, 100, 500):
        cloud = sample_cloud(N, 5e-6, seed=N)
        dbar = mean_blockade_shift(cloud, coupling)
        l = l_factor(N, rabi, dbar)
        print("%6d %14.1f %10.2e %12.1f %12.2e"
              % (N, dbar / TWO_PI / 1e6, l - 1,
                 pi_pulse_time(N, rabi, dbar) * 1e9,
                 p_double_estimate(N, rabi, dbar)))

    print("\nfull truncated-basis integrator vs closed form (t = t_pi)")
    print("%6s %12s %12s %14s" % ("N", "1 - 1/l", "P_zero", "P_double/est"))
    for N in (2, 4, 8, 12):
        cloud = sample_cloud(N, 5e-6, seed=100 + N)
        dbar = mean_blockade_shift(cloud, coupling)
        H = build_hamiltonian(cloud, coupling,
                              PulseSpec(rabi, np.zeros(3), 0.0))
        t_pi = pi_pulse_time(N, rabi, dbar)
        p0, _, p2 = evolve(CollectiveState.ground(N), H, t_pi).probabilities()
        est = p_double_estimate(N, rabi, dbar)
        print("%6d %12.3e %12.3e %14.2f"
              % (N, 1 - 1 / l_factor(N, rabi, dbar), p0, p2 / est))


if __name__ == "__main__":
    main()
