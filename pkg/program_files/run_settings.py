# -*- coding: utf-8 -*-
"""
    Run settings of an analysis.

    The defaults are stored in run_settings.json next to this module, a
    user settings file and the command line flags override them.
"""
from dataclasses import asdict, dataclass, fields
import json
import os

from program_files.preprocessing.filter_profile import FilterConfig
from program_files.processing.mixture_model import COMPONENT_MODES, FAMILIES
from program_files.processing.read_assignment import ASSIGNMENT_RULES

DEFAULT_SETTINGS_PATH = os.path.join(os.path.dirname(__file__),
                                     "run_settings.json")


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 0.05
    kappa: float = 0.70
    noise_threshold: float = 10.0
    min_map_quality: int = 1
    depth_filter: bool = True
    n_strains: int = 2
    model_family: str = "gaussian"
    component_mode: str = "paired"
    assignment_rule: str = "map"
    regions_path: str = None
    output_dir: str = "results"
    seed: int = 0
    num_threads: int = 1
    plots: bool = False
    xlsx_results: bool = False
    sample_id: str = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha has to be within (0, 1)")
        if self.n_strains not in (1, 2, 3):
            raise ValueError("the number of strains has to be 1, 2 or 3")
        if self.model_family not in FAMILIES:
            raise ValueError("model family has to be one of "
                             + ", ".join(FAMILIES))
        if self.component_mode not in COMPONENT_MODES:
            raise ValueError("component mode has to be one of "
                             + ", ".join(COMPONENT_MODES))
        if self.assignment_rule not in ASSIGNMENT_RULES:
            raise ValueError("assignment rule has to be one of "
                             + ", ".join(ASSIGNMENT_RULES))
        if self.assignment_rule != "map" and self.n_strains > 2:
            raise ValueError("the {} rule separates two strains only"
                             .format(self.assignment_rule))
        if self.num_threads < 1:
            raise ValueError("at least one thread is required")
        # validates kappa, noise threshold and map quality
        self.filter_config()

    def filter_config(self) -> FilterConfig:
        return FilterConfig(kappa=self.kappa,
                            noise_threshold=self.noise_threshold,
                            min_map_quality=self.min_map_quality,
                            depth_filter=self.depth_filter)

    def to_dict(self) -> dict:
        return asdict(self)


def import_run_settings_json(json_file_path: str = None) -> dict:
    """
        Imports run settings from a json file. The packaged default
        settings are loaded if no or a non existing file is given.

        :param json_file_path: path of a user settings file
        :type json_file_path: str

        :return: - **settings** (dict) - setting name -> value
    """
    # load the default settings if the user specific file does not
    # exist
    if json_file_path is None or not os.path.exists(json_file_path):
        json_file_path = DEFAULT_SETTINGS_PATH
    with open(json_file_path, "r", encoding="utf-8") as infile:
        return json.load(infile)


def create_run_config(settings_path: str = None, **overrides) -> RunConfig:
    """
        Combines default settings, a settings file and overrides (None
        values are ignored) to a RunConfig.

        :raise: - **ValueError** - unknown setting or invalid value
    """
    settings = import_run_settings_json(DEFAULT_SETTINGS_PATH)
    if settings_path is not None:
        if not os.path.exists(settings_path):
            raise FileNotFoundError("settings file {} not found".format(
                settings_path))
        settings.update(import_run_settings_json(settings_path))
    settings.update({key: value for key, value in overrides.items()
                     if value is not None})
    known = {config_field.name for config_field in fields(RunConfig)}
    unknown = set(settings) - known
    if unknown:
        raise ValueError("unknown settings: " + ", ".join(sorted(unknown)))
    return RunConfig(**settings)
