import numpy as np
import pytest

from rollsim.config import (ConfigError, UnknownPresetError, list_presets,
                            load_scenario, load_scenario_dict, resolve)


def test_bundled_presets_present():
    names = list_presets()
    for name in ("freefall", "balancing", "lifting"):
        assert name in names


def test_freefall_preset_contents():
    sc, params, mag = load_scenario("freefall")
    assert sc.name == "freefall"
    assert sc.controller is None
    assert not sc.magnetics and not mag.enabled
    assert sc.horizon == 5.0 and sc.dt == 1e-3
    y0 = np.degrees(sc.y0_array())
    assert np.allclose(y0, [0, 30, 185, 0, 0, 0, 0, 0])


def test_balancing_preset_contents():
    sc, params, mag = load_scenario("balancing")
    c = sc.controller
    assert c is not None
    assert c.gains.Kp == ((20.0, 0.0, 0.3, 0.0), (0.0, 30.0, 0.0, 0.7))
    assert c.gains.Kd == ((0.1, 0.0, 0.5, 0.0), (0.0, 0.2, 0.0, 0.75))
    assert np.degrees(c.setpoints.theta_d) == pytest.approx([-180.0, -155.0])
    assert np.degrees(c.setpoints.phi_d) == pytest.approx([180.0, 185.0])
    assert sc.horizon == 10.0


def test_lifting_preset_contents():
    sc, params, mag = load_scenario("lifting")
    c = sc.controller
    assert c.gains.Kp == ((1.3, 0.0, 0.3, 0.0), (0.0, 2.5, 0.0, 1.8))
    assert np.degrees(sc.y0_array()[3]) == pytest.approx(-107.19)


def test_unknown_preset_lists_alternatives():
    with pytest.raises(UnknownPresetError, match="balancing"):
        resolve("nosuch")


def test_config_dir_override(tmp_path, monkeypatch):
    custom = tmp_path / "mine.yaml"
    custom.write_text("""
name: mine
scenario:
  y0_deg: [0, 0, 180, 0, 0, 0, 0, 0]
  horizon: 1.0
""")
    monkeypatch.setenv("ROLLSIM_CONFIG_DIR", str(tmp_path))
    sc, _, _ = load_scenario("mine")
    assert sc.name == "mine" and sc.horizon == 1.0
    assert "mine" in list_presets()
    # bundled presets still resolve
    assert resolve("freefall")


def test_path_argument_bypasses_preset_search(tmp_path):
    f = tmp_path / "direct.yaml"
    f.write_text("scenario:\n  y0_deg: [0,0,0,0,0,0,0,0]\n")
    sc, _, _ = load_scenario(str(f))
    assert sc.name == "direct"  # falls back to the file stem
    with pytest.raises(ConfigError, match="not found"):
        load_scenario(str(tmp_path / "missing.yaml"))


@pytest.mark.parametrize("doc,fragment", [
    ({"scenario": {"y0_deg": [0] * 8}, "bogus": 1}, "bogus"),
    ({"scenario": {"y0_deg": [0] * 8, "step": 1}}, "step"),
    ({"scenario": {"y0_deg": [0] * 7}}, "y0_deg"),
    ({"scenario": {"y0_deg": [0] * 8, "dt": -1}}, "dt"),
    ({"scenario": {"y0_deg": [0] * 8, "potential": "x"}}, "potential"),
    ({}, "scenario"),
    ({"scenario": {"y0_deg": [0] * 8}, "params": {"m_p": -1}}, "m_p"),
    ({"scenario": {"y0_deg": [0] * 8}, "params": {"masa": 1}}, "masa"),
    ({"scenario": {"y0_deg": [0] * 8},
      "magnetics": {"enabled": True, "p_max": 1}}, "p_max"),
    ({"scenario": {"y0_deg": [0] * 8},
      "controller": {"kp": [[1, 0, 0, 0], [0, 1, 0, 0]]}}, "kd"),
    ({"scenario": {"y0_deg": [0] * 8, "horizon": "ten"}}, "horizon"),
])
def test_rejects_malformed_documents(doc, fragment):
    with pytest.raises(ConfigError, match=fragment):
        load_scenario_dict(doc, default_name="t")


def test_controller_section_full():
    doc = {
        "scenario": {"y0_deg": [0] * 8, "horizon": 2.0},
        "controller": {
            "kp": [[1, 0, 0.5, 0], [0, 2, 0, 0.5]],
            "kd": [[0.1, 0, 0.2, 0], [0, 0.1, 0, 0.2]],
            "setpoints": {"theta_d_deg": [10, -10], "phi_d_deg": [180, 185]},
            "saturation": 5.0,
            "psi_rate": True,
        },
    }
    sc, _, _ = load_scenario_dict(doc, default_name="c")
    c = sc.controller
    assert c.saturation == 5.0 and c.psi_rate
    assert c.setpoints.theta_d[0] == pytest.approx(np.radians(10))
    assert c.setpoints.dtheta_d == (0.0, 0.0)


def test_controller_gain_sparsity_enforced_through_config():
    doc = {
        "scenario": {"y0_deg": [0] * 8},
        "controller": {
            "kp": [[1, 1, 0, 0], [0, 1, 0, 1]],
            "kd": [[0, 0, 0, 0], [0, 0, 0, 0]],
            "setpoints": {"theta_d_deg": [0, 0], "phi_d_deg": [0, 0]},
        },
    }
    with pytest.raises(ConfigError):
        load_scenario_dict(doc, default_name="c")
    doc["controller"]["allow_dense"] = True
    sc, _, _ = load_scenario_dict(doc, default_name="c")
    assert sc.controller.gains.Kp[0][1] == 1.0


def test_magnetics_section():
    doc = {
        "scenario": {"y0_deg": [0] * 8},
        "magnetics": {"enabled": True, "B_max": 0.1, "P_max": 0.05},
    }
    sc, _, mag = load_scenario_dict(doc, default_name="m")
    assert sc.magnetics and mag.enabled
    assert mag.B_max == 0.1 and mag.P_max == 0.05
    assert mag.A == 0.0025  # untouched default
