import numpy as np
import pytest

from rydsources.species import RB87, AtomicSpecies


def test_default_d2_line_data():
    assert RB87.mass == pytest.approx(1.443e-25, rel=1e-3)
    assert RB87.linewidth_Gamma == pytest.approx(2 * np.pi * 6.07e6)
    assert RB87.saturation_intensity == pytest.approx(16.7)
    assert RB87.line_wavelength == pytest.approx(780e-9)
    assert RB87.ground_hyperfine_splitting == pytest.approx(
        2 * np.pi * 6.8e9)
    assert RB87.rydberg_decay_gamma_R == pytest.approx(2 * np.pi * 1e3)


def test_overrides():
    sp = AtomicSpecies(mass=2e-25)
    assert sp.mass == 2e-25
    assert sp.linewidth_Gamma == RB87.linewidth_Gamma


def test_positivity_validation():
    with pytest.raises(ValueError):
        AtomicSpecies(mass=-1.0)
    with pytest.raises(ValueError):
        AtomicSpecies(saturation_intensity=0.0)


def test_frozen():
    with pytest.raises(Exception):
        RB87.mass = 1.0
