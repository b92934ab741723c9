import json

import pytest


def test_default_settings():
    from program_files.run_settings import create_run_config, \
        import_run_settings_json

    config = create_run_config()

    assert config.alpha == 0.05
    assert config.kappa == 0.70
    assert config.noise_threshold == 10.0
    assert config.n_strains == 2
    assert config.model_family == "gaussian"
    assert config.assignment_rule == "map"
    # a missing file falls back to the packaged defaults
    assert import_run_settings_json("does_not_exist.json") \
        == import_run_settings_json()


def test_settings_file_and_overrides(tmp_path):
    """ flags override the settings file, None values are ignored """
    from program_files.run_settings import create_run_config

    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"alpha": 0.01, "n_strains": 3,
                                "model_family": "binomial"}))
    config = create_run_config(str(path), alpha=0.1, kappa=None)

    assert config.alpha == 0.1
    assert config.n_strains == 3
    assert config.model_family == "binomial"
    assert config.kappa == 0.70
    assert config.filter_config().kappa == 0.70
    assert config.to_dict()["n_strains"] == 3


def test_invalid_settings(tmp_path):
    from program_files.run_settings import create_run_config

    with pytest.raises(FileNotFoundError):
        create_run_config(str(tmp_path / "missing.json"))
    invalid = [{"alpha": 0}, {"alpha": 1.5}, {"n_strains": 4},
               {"model_family": "poisson"}, {"component_mode": "free"},
               {"assignment_rule": "coin"}, {"num_threads": 0},
               {"kappa": 2.0}, {"noise_threshold": 60},
               {"n_strains": 3, "assignment_rule": "binomial"},
               {"coverage": 30}]
    for overrides in invalid:
        with pytest.raises(ValueError):
            create_run_config(**overrides)
