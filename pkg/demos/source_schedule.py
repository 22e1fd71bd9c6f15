"""Repetition-rate budget for the m-excitation single-atom source.

Each blockade cycle transfers one excitation with a collectively
enhanced pi pulse at sqrt(N - i) |Omega|; a loaded cloud of N atoms
supports floor(N/m) deterministic shots before reloading. Prints the
pulse rate as a function of m for the Fig.-2-style 40 us ejection.
"""

import numpy as np

from rydsources import m_excitation_schedule

TWO_PI = 2 * np.pi


def main():
    rabi = TWO_PI * 1e6
    eject_time = 40e-6
    print("N = 100 atoms, |Omega|/2pi = 1 MHz, eject time 40 us")
    print("%6s %12s %12s %12s %12s" % ("m", "t_prep (us)", "cycle (us)",
                                       "shots", "rate (kHz)"))
    for m in (1, 2, 5, 10, 50, 100):
        rep = m_excitation_schedule(100, m, rabi, eject_time)
        print("%6d %12.3f %12.2f %12d %12.2f"
              % (m, rep["t_prep"] * 1e6, rep["cycle_time"] * 1e6,
                 rep["repetitions"], rep["pulse_rate"] / 1e3))
    one = m_excitation_schedule(100, 1, rabi, eject_time)
    print("\nsingle-excitation source: %.0f pulses/s, %d shots per load"
          % (one["pulse_rate"], one["repetitions"]))


if __name__ == "__main__":
    main()
