import json

import numpy as np
import pytest

from rydsources.cli import main
from rydsources.config import (ConfigError, load_config, load_config_file,
                               resolved_for_provenance, species_from_config)

TWO_PI = 2 * np.pi


class TestConfig:
    def test_defaults_resolve(self):
        cfg = load_config("eject", {})
        assert cfg["fort_power"] == pytest.approx(0.1)
        assert cfg["eject_detuning_b"] == pytest.approx(TWO_PI * 1e9)
        assert cfg["eject_offset"] == pytest.approx(-3e-6)
        assert cfg["include_recoil_kicks"] is True
        assert cfg["seed"] == 12345

    def test_overrides(self):
        cfg = load_config("schedule", {"N": 200, "rabi": "2 MHz",
                                       "eject_time": "50 us"})
        assert cfg["N"] == 200
        assert cfg["rabi"] == pytest.approx(TWO_PI * 2e6)
        assert cfg["eject_time"] == pytest.approx(50e-6)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            load_config("fig1", {"trails": 5})

    def test_nested_species_unknown_key(self):
        with pytest.raises(ConfigError, match="species.linewdith"):
            load_config("fig1", {"species": {"linewdith": "6 MHz"}})

    def test_missing_unit_rejected(self):
        with pytest.raises(ConfigError):
            load_config("fig1", {"diameter": 5e-6})

    def test_wrong_unit_kind_rejected(self):
        with pytest.raises(ConfigError):
            load_config("fig1", {"diameter": "5 MHz"})

    def test_type_validation(self):
        with pytest.raises(ConfigError):
            load_config("schedule", {"N": "100"})
        with pytest.raises(ConfigError):
            load_config("schedule", {"N": True})
        with pytest.raises(ConfigError):
            load_config("fig1", {"N_values": []})
        with pytest.raises(ConfigError):
            load_config("eject", {"gravity": 1})

    def test_unknown_subcommand(self):
        with pytest.raises(ConfigError):
            load_config("fig3", {})

    def test_invalid_json_file(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config_file("fig1", p)

    def test_species_override(self):
        cfg = load_config("fig1", {"species": {"linewidth": "6.07 MHz"}})
        sp = species_from_config(cfg)
        assert sp.linewidth_Gamma == pytest.approx(TWO_PI * 6.07e6)
        # untouched fields keep their defaults
        assert sp.mass == pytest.approx(1.443e-25, rel=1e-3)

    def test_provenance_json_safe(self):
        cfg = load_config("emission", {})
        blob = resolved_for_provenance(cfg)
        json.dumps(blob)    # raises if anything non-serializable remains


SMALL_FIG1 = {"N_values": [1, 2, 5, 10], "trials": 3,
              "full_integrator_cap": 5, "seed": 7}
SMALL_EJECT = {"trajectories": 3, "trajectories_a": 2, "duration": "120 us",
               "include_recoil_kicks": False, "tolerance": 1e-8,
               "profile_samples": 21, "seed": 7}
SMALL_EMISSION = {"N_values": [25], "trials": 2, "grid_points": 181,
                  "seed": 7}


def write_config(tmp_path, payload, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


class TestCliRuns:
    def test_schedule(self, tmp_path):
        rc = main(["schedule", "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads((tmp_path / "schedule.json").read_text())
        assert report["pulse_rate"] == pytest.approx(24969, rel=1e-3)
        assert report["repetitions"] == 100
        assert report["provenance"]["subcommand"] == "schedule"
        assert report["provenance"]["master_seed"] == 12345

    def test_fig1(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_FIG1)
        rc = main(["fig1", "--config", cfg, "--out", str(tmp_path),
                   "--workers", "1"])
        assert rc == 0
        lines = (tmp_path / "fig1.csv").read_text().splitlines()
        assert lines[0].startswith("# provenance:")
        assert lines[1].split(",")[0] == "N"
        assert len(lines) == 2 + len(SMALL_FIG1["N_values"])
        summary = json.loads((tmp_path / "fig1_summary.json").read_text())
        comp = summary["closed_form_vs_integrator"]
        assert [c["N"] for c in comp] == [1, 2, 5]
        for c in comp[1:]:
            assert c["P_zero_integrator"] == pytest.approx(
                c["P_zero_closed_form"], rel=1.0)
        assert "level_discrepancy_note" in summary

    def test_eject(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_EJECT)
        rc = main(["eject", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 0
        summary = json.loads((tmp_path / "eject_summary.json").read_text())
        assert summary["t1_estimate"] == pytest.approx(37.6e-6, rel=0.02)
        n_scat = summary["n_scat_over_t1_at_peak_intensity"]
        assert n_scat["b"] > 10 * n_scat["a"]
        assert summary["states"]["b"]["escape_fraction"] > 0.5
        assert summary["states"]["a"]["escape_fraction"] == 0.0
        assert "collimation" in summary["states"]["b"]
        profile = (tmp_path / "eject_profile.csv").read_text().splitlines()
        assert len(profile) == 2 + 21
        assert (tmp_path / "trajectories.csv").exists()

    def test_emission(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_EMISSION)
        rc = main(["emission", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 0
        metrics = json.loads(
            (tmp_path / "emission_metrics.json").read_text())
        block = metrics["patterns"][0]
        assert block["N"] == 25
        assert block["peak_mean"] == pytest.approx(25, rel=1e-3)
        assert abs(block["background_mean"] - 1.0) < 0.5
        assert block["double_channel_at_peak_mean"] < 5
        assert (tmp_path / "pattern_N25.csv").exists()

    def test_reruns_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            out.mkdir()
            assert main(["schedule", "--out", str(out)]) == 0
            cfg = write_config(tmp_path, SMALL_EMISSION)
            assert main(["emission", "--config", cfg,
                         "--out", str(out)]) == 0
        for name in ("schedule.json", "emission_metrics.json",
                     "pattern_N25.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_seed_override_changes_outputs(self, tmp_path):
        cfg = write_config(tmp_path, SMALL_FIG1)
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir(), b.mkdir()
        assert main(["fig1", "--config", cfg, "--out", str(a),
                     "--workers", "1"]) == 0
        assert main(["fig1", "--config", cfg, "--out", str(b),
                     "--workers", "1", "--seed", "99"]) == 0
        assert (a / "fig1.csv").read_bytes() != (b / "fig1.csv").read_bytes()


class TestCliErrors:
    def test_unknown_key_exit_code(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"trails": 5})
        assert main(["fig1", "--config", cfg,
                     "--out", str(tmp_path)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_non_strict_drops_unknown_keys(self, tmp_path):
        cfg = write_config(tmp_path, {**SMALL_FIG1, "comment": "ignored"})
        assert main(["fig1", "--config", cfg, "--out", str(tmp_path),
                     "--no-strict", "--workers", "1"]) == 0

    def test_missing_config_file(self, tmp_path):
        assert main(["fig1", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path)]) == 2

    def test_bad_unit_exit_code(self, tmp_path):
        cfg = write_config(tmp_path, {"diameter": "five microns"})
        assert main(["fig1", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_numerical_failure_exit_code(self, tmp_path, capsys):
        # eject beam off: |b> is never ejected -> exit 3
        cfg = write_config(tmp_path, {**SMALL_EJECT, "eject_power": "0 uW"})
        assert main(["eject", "--config", cfg, "--out", str(tmp_path)]) == 3
        assert "numerical failure" in capsys.readouterr().err
