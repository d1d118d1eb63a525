"""Scenario schema strictness, round-trips and the canonical presets."""

import math

import pytest

from bohmsim.model import fast_pointer_E
from bohmsim.scenario import (SCHEMA_VERSION, ScenarioError, load_scenario, preset,
                              preset_names, save_scenario, scenario_from_dict,
                              scenario_to_dict, with_backend, with_n_particles, with_seed)


class TestRoundTrip:
    @pytest.mark.parametrize("name", preset_names())
    def test_dict_round_trip(self, name):
        sc = preset(name)
        assert scenario_from_dict(scenario_to_dict(sc)) == sc

    def test_file_round_trip(self, tmp_path):
        sc = preset("fig7")
        path = tmp_path / "scenario.json"
        save_scenario(sc, path)
        again = load_scenario(path)
        assert again == sc
        save_scenario(again, tmp_path / "again.json")
        assert (tmp_path / "again.json").read_text() == path.read_text()


class TestStrictness:
    def test_unknown_top_level_key(self):
        data = scenario_to_dict(preset("fig4"))
        data["extra"] = 1
        with pytest.raises(ScenarioError, match="extra"):
            scenario_from_dict(data)

    @pytest.mark.parametrize("block", ["params", "ensemble", "integrator", "outputs"])
    def test_unknown_nested_key(self, block):
        data = scenario_to_dict(preset("fig4"))
        data[block]["bogus"] = 1
        with pytest.raises(ScenarioError, match="bogus"):
            scenario_from_dict(data)

    def test_particle_count_mismatch(self):
        data = scenario_to_dict(preset("fig4"))
        data["params"]["n_particles"] = 3
        with pytest.raises(ScenarioError, match="n_particles"):
            scenario_from_dict(data)

    def test_schema_version_pinned(self):
        data = scenario_to_dict(preset("fig4"))
        data["schema_version"] = SCHEMA_VERSION + 1
        with pytest.raises(ScenarioError, match="schema_version"):
            scenario_from_dict(data)

    def test_bad_physics_rejected(self):
        data = scenario_to_dict(preset("fig4"))
        data["params"]["xi_y"] = -1.0
        with pytest.raises(ScenarioError):
            scenario_from_dict(data)

    def test_malformed_values_rejected(self):
        for mutate in (
            lambda d: d["params"].__setitem__("xi_x", None),
            lambda d: d["params"].__setitem__("pointer_velocities", [[1.0]]),
            lambda d: d["ensemble"]["z_init"].update(mode="gaussian", seed=None),
            lambda d: d["integrator"].__setitem__("rel_tol", "fast"),
        ):
            data = scenario_to_dict(preset("fig4"))
            mutate(data)
            with pytest.raises(ScenarioError):
                scenario_from_dict(data)

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        with pytest.raises(ScenarioError):
            load_scenario(path)

    def test_unknown_preset(self):
        with pytest.raises(ScenarioError):
            preset("fig99")


class TestPresetCatalog:
    def test_all_figures_present(self):
        names = preset_names()
        for k in range(2, 13):
            assert f"fig{k}" in names

    def test_caption_parameters(self):
        p3 = preset("fig3").params
        assert (p3.xi_x, p3.xi_y, p3.r, p3.R, p3.mu, p3.d_prime) == (10, 10, 1, 1, 1, 3)
        assert p3.single_pointer_xi == 10.0
        assert fast_pointer_E(p3) == pytest.approx(3.0)

        p4 = preset("fig4").params
        assert p4.R == 0.2
        assert fast_pointer_E(p4) == pytest.approx(0.12)
        assert preset("fig4").ensemble.z_init.value == 0.0

        assert preset("fig5").ensemble.z_init.value == 0.3
        assert preset("fig5-text").ensemble.z_init.value == 0.5
        assert preset("fig6") == preset("fig5").__class__(
            "fig6", preset("fig5").params, preset("fig5").ensemble,
            preset("fig5").integrator, preset("fig5").outputs)

        p7 = preset("fig7")
        assert p7.params.pointer_velocities == ((10.0, 0.0), (0.0, 10.0))
        assert p7.ensemble.z_init.values == (0.01, 0.01)
        assert p7.ensemble.count_per_slit == 1
        assert preset("fig8").ensemble.z_init.values == (0.5, 0.9)

        for name, n, sig in (("fig9", 10, 0.0), ("fig10", 10, 0.3),
                             ("fig11", 10, 1.0), ("fig12", 200, 0.3)):
            sc = preset(name)
            assert sc.params.n_particles == n
            assert sc.ensemble.backend == "reduced"
            assert sc.ensemble.z_init.value * math.sqrt(n) == pytest.approx(sig, abs=1e-12)

    def test_uncoupled_preset(self):
        assert preset("fig2").params.single_pointer_xi == 0.0


class TestOverrides:
    def test_with_backend(self):
        sc = with_backend(preset("fig4"), "full-numeric")
        assert sc.ensemble.backend == "full-numeric"
        with pytest.raises(ScenarioError):
            with_backend(preset("fig4"), "warp-drive")

    def test_with_n_preserves_sigma_hat(self):
        sc = with_n_particles(preset("fig10"), 40)
        assert sc.params.n_particles == 40
        assert sc.ensemble.z_init.value * math.sqrt(40) == pytest.approx(0.3, abs=1e-12)

    def test_with_n_rejects_two_pointer(self):
        with pytest.raises(ScenarioError):
            with_n_particles(preset("fig7"), 5)

    def test_with_seed(self):
        sc = with_seed(preset("fig4"), 99)
        assert sc.ensemble.z_init.mode == "gaussian"
        assert sc.ensemble.z_init.seed == 99
