# -*- coding: utf-8 -*-
"""
    Result files of an analysed sample: the JSON report and the
    optional xlsx export of the result tables.
"""
from dataclasses import asdict, dataclass, field, fields
import json
import logging
import math
import os

import pandas

SCHEMA_VERSION = 1


@dataclass
class Report:
    """
        Summary of an analysed sample. ``em_proportions`` and
        ``component_table`` are only filled for samples called mixed.
    """
    sample_id: str
    call: str
    lr_statistic: float
    threshold_c: float
    alpha: float
    epsilon0: float
    epsilon1: float
    p_mle: float
    em_proportions: list = None
    component_table: list = field(default_factory=list)
    n_filtered_sites: int = 0
    n_variant_sites: int = 0
    n_assigned_reads: int = 0
    warnings: list = field(default_factory=list)
    p_value: float = None
    n_strains: int = 2
    model_family: str = "gaussian"
    component_mode: str = "paired"
    proportion_method: str = None
    mate_consistency: float = None
    mean_depth: float = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        """
            :raise: - **ValueError** - non-finite numeric field
        """
        content = asdict(self)
        for name, value in _numbers(content):
            if not math.isfinite(value):
                raise ValueError("report field {} is not finite: {}".format(
                    name, value))
        return content

    @classmethod
    def from_dict(cls, content: dict) -> "Report":
        known = {report_field.name for report_field in fields(cls)}
        return cls(**{key: value for key, value in content.items()
                      if key in known})


def _numbers(content, prefix: str = ""):
    """ yields (name, value) of every float nested in the content """
    if isinstance(content, dict):
        for key, value in content.items():
            yield from _numbers(value, prefix + str(key) + ".")
    elif isinstance(content, (list, tuple)):
        for index, value in enumerate(content):
            yield from _numbers(value, prefix + str(index) + ".")
    elif isinstance(content, float):
        yield prefix.rstrip("."), content


def component_table(model) -> list:
    """ mu, sigma and weight of every mixture component """
    if model is None:
        return []
    return [{"mu": component.mu, "sigma": component.sigma,
             "weight": component.weight} for component in model.components]


def write_report(report: Report, path: str) -> None:
    """ writes the report as JSON file """
    with open(path, "w") as report_file:
        json.dump(report.to_dict(), report_file, indent=2)
    logging.info("\t Report saved as " + str(path))


def read_report(path: str) -> Report:
    """ reads a report written by write_report """
    with open(path, "r") as report_file:
        return Report.from_dict(json.load(report_file))


def xlsx(tables: dict, filepath: str) -> None:
    """
        Saves result tables as sheets of one xlsx-file.

        :param tables: sheet name -> pandas.DataFrame
        :type tables: dict
        :param filepath: path of the xlsx-file
        :type filepath: str
    """
    with pandas.ExcelWriter(filepath, engine="xlsxwriter") as writer:
        for name, table in tables.items():
            # excel limits sheet names to 31 characters
            table.to_excel(writer, sheet_name=str(name)[:31])
    logging.info("\t Results saved as xlsx " + os.path.basename(filepath))
