import json

import pytest

from driftbench.config import ConfigError, SCHEMA, load_run_config, resolve_config


class TestResolve:
    def test_defaults(self):
        cfg = resolve_config({})
        assert cfg.methods == ("none", "means", "drca", "ldsp", "selftrain")
        assert cfg.drca.target_weight == 0.1
        assert cfg.drca.n_components == 127
        assert cfg.ldsp.within_weight == 10.0
        assert cfg.ldsp.between_weight == 100.0
        assert cfg.selftrain.confidence_threshold == 0.99
        assert cfg.selftrain.cumulative is True
        assert cfg.classifier.reg_strength == 1.0
        assert cfg.normalize is True
        assert cfg.f1_average == "macro"

    def test_echo_covers_every_key(self):
        echo = resolve_config({}).echo()
        assert set(echo) == set(SCHEMA)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config key.*drca.lambda"):
            resolve_config({"drca.lambda": 0.1})

    def test_type_mismatch_rejected(self):
        with pytest.raises(ConfigError, match="drca.components"):
            resolve_config({"drca.components": "many"})
        with pytest.raises(ConfigError, match="selftrain.cumulative"):
            resolve_config({"selftrain.cumulative": 1})

    def test_methods_subset_preserves_order(self):
        cfg = resolve_config({"methods": "ldsp, none"})
        assert cfg.methods == ("ldsp", "none")

    def test_methods_unknown_name(self):
        with pytest.raises(ConfigError, match="unknown method 'magic'"):
            resolve_config({"methods": "magic"})

    def test_invalid_f1_average(self):
        with pytest.raises(ConfigError, match="f1_average"):
            resolve_config({"metrics.f1_average": "micro"})

    def test_invalid_threshold_propagates_as_config_error(self):
        with pytest.raises(ConfigError, match="confidence_threshold"):
            resolve_config({"selftrain.threshold": 1.5})


class TestLoadFile:
    def test_round_trip_from_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"methods": "drca", "drca.components": 5}))
        cfg = load_run_config(path)
        assert cfg.methods == ("drca",)
        assert cfg.drca.n_components == 5

    def test_overrides_win(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"synthetic.seed": 1}))
        cfg = load_run_config(path, {"synthetic.seed": 99})
        assert cfg.synthetic.seed == 99

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{nope")
        with pytest.raises(ConfigError, match="JSON"):
            load_run_config(path)

    def test_non_object_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="object"):
            load_run_config(path)
