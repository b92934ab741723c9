# -*- coding: utf-8 -*-
"""
    Evaluation of detection and separation results against the ground
    truth of simulated samples.
"""
from dataclasses import asdict, dataclass
import json
import logging
import os

import numpy as np
import pandas
from sklearn import metrics

from program_files.postprocessing.create_results import read_report
from program_files.processing.consensus import import_consensus
from program_files.processing.hypothesis_test import chi2_survival
from program_files.processing.read_assignment import read_assignment_table
from program_files.simulation.simulate_sample import read_truth


@dataclass
class PanelRecord:
    sample_id: str
    true_label: str
    true_proportions: list
    lr_statistic: float
    call: str
    estimated_proportions: list
    snp_distance: int = None
    p_value: float = None


@dataclass
class ConfusionMatrix:
    """ rows: true strain, columns: assigned strain """
    counts: np.ndarray

    @property
    def n_strains(self) -> int:
        return len(self.counts)

    def to_frame(self) -> pandas.DataFrame:
        labels = ["strain{}".format(k) for k in range(self.n_strains)]
        return pandas.DataFrame(self.counts, index=labels, columns=labels)


def _major(proportions) -> float:
    if np.ndim(proportions) == 0:
        return float(proportions)
    return float(max(proportions))


def rmse(true_props: list, est_props: list) -> float:
    """
        Root mean square error of the major strain proportions. Entries
        may be major proportions or complete proportion lists.

        :raise: - **ValueError** - empty input or different lengths
    """
    if not len(true_props):
        raise ValueError("rmse of an empty panel")
    if len(true_props) != len(est_props):
        raise ValueError("true and estimated proportions differ in "
                         "length")
    errors = [_major(true) - _major(estimate)
              for true, estimate in zip(true_props, est_props)]
    return float(np.sqrt(np.mean(np.square(errors))))


def roc_auc(scores: list, labels: list) -> tuple:
    """
        Receiver operating characteristic of a score separating mixed
        from pure samples. Every distinct score is one threshold.

        :param scores: score per sample, higher means mixed
        :type scores: list
        :param labels: "mixed" or "pure" per sample
        :type labels: list

        :return: - **curve** (list) - (false positive rate, true \
                    positive rate) points starting at (0, 0)
                 - **auc** (float) - area under the curve
        :raise: - **ValueError** - only one class present
    """
    truth = [label == "mixed" for label in labels]
    if all(truth) or not any(truth):
        raise ValueError("ROC analysis requires pure and mixed samples")
    fpr, tpr, _ = metrics.roc_curve(truth, scores, drop_intermediate=False)
    curve = [(float(x), float(y)) for x, y in zip(fpr, tpr)]
    return curve, float(metrics.auc(fpr, tpr))


def rank_provenance(provenance: dict, proportions: list) -> dict:
    """
        Relabels the true strains by descending true proportion, so
        that strain 0 is the major strain as in the assignments.
    """
    order = sorted(range(len(proportions)),
                   key=lambda strain: -proportions[strain])
    rank = {strain: position for position, strain in enumerate(order)}
    return {read_id: rank[strain] for read_id, strain in provenance.items()}


def confusion_matrix(assignments: list, provenance: dict,
                     n_strains: int = None) -> ConfusionMatrix:
    """
        Tallies true against assigned strain of every assigned read.

        :param assignments: StrainAssignment objects
        :type assignments: list
        :param provenance: read id -> true strain index
        :type provenance: dict
        :param n_strains: matrix size, defaults to the largest index + 1
        :type n_strains: int

        :return: - **matrix** (ConfusionMatrix) -
        :raise: - **ValueError** - assigned read without provenance
    """
    assigned = [assignment for assignment in assignments
                if assignment.is_assigned]
    missing = [assignment.read_id for assignment in assigned
               if assignment.read_id not in provenance]
    if missing:
        raise ValueError("no provenance for read " + missing[0])
    true = [provenance[assignment.read_id] for assignment in assigned]
    predicted = [assignment.strain for assignment in assigned]
    if n_strains is None:
        n_strains = max(true + predicted, default=0) + 1
    counts = metrics.confusion_matrix(true, predicted,
                                      labels=list(range(n_strains))) \
        if assigned else np.zeros((n_strains, n_strains), dtype=int)
    return ConfusionMatrix(counts=np.asarray(counts, dtype=int))


def consensus_mismatches(consensus: str, true_genome: str,
                         snp_positions: list) -> int:
    """
        Number of SNP positions at which the consensus differs from the
        true genome.

        :raise: - **ValueError** - sequences of different length
    """
    if len(consensus) != len(true_genome):
        raise ValueError("consensus and genome differ in length")
    positions = sorted({snp[0] if isinstance(snp, (tuple, list)) else snp
                        for snp in snp_positions})
    return sum(consensus[position] != true_genome[position]
               for position in positions)


def alpha_calibration_grid(records: list) -> pandas.DataFrame:
    """
        Smallest significance level detecting a mixed sample while
        every pure sample of the same SNP distance is still called
        pure. Rows are SNP distances, columns major proportions, cells
        without such a level are NaN.
    """
    pure_minimum = {}
    for record in records:
        if record.true_label == "pure":
            pure_minimum[record.snp_distance] = min(
                pure_minimum.get(record.snp_distance, 1.0),
                chi2_survival(record.lr_statistic))
    cells = {}
    for record in records:
        if record.true_label != "mixed":
            continue
        p_value = chi2_survival(record.lr_statistic)
        limit = pure_minimum.get(record.snp_distance, 1.0)
        key = (record.snp_distance,
               round(_major(record.true_proportions), 2))
        cells.setdefault(key, []).append(p_value if p_value < limit
                                         else np.nan)
    if not cells:
        return pandas.DataFrame()
    grid = pandas.Series({key: np.nanmedian(values)
                          if not np.all(np.isnan(values)) else np.nan
                          for key, values in cells.items()}).unstack()
    grid.index.name = "snp_distance"
    grid.columns.name = "major_proportion"
    return grid.sort_index().sort_index(axis=1)


def collect_panel(panel_dir: str) -> list:
    """
        Reads truth.json and report.json of every sample directory of a
        panel. Directories lacking one of the files or holding an
        unreadable one are skipped with a warning.

        :return: - **samples** (list) - dicts with "directory", \
            "truth", "spec", "report" and "record" (PanelRecord)
    """
    samples = []
    for name in sorted(os.listdir(panel_dir)):
        directory = os.path.join(panel_dir, name)
        if not os.path.isdir(directory):
            continue
        truth_path = os.path.join(directory, "truth.json")
        report_path = os.path.join(directory, "report.json")
        if not os.path.isfile(truth_path):
            logging.warning("\t skipping {}: no truth.json".format(name))
            continue
        if not os.path.isfile(report_path):
            logging.warning("\t skipping {}: no report.json".format(name))
            continue
        try:
            content = read_truth(truth_path)
            report = read_report(report_path)
        except (ValueError, KeyError, TypeError) as error:
            logging.warning("\t skipping {}: {}".format(name, error))
            continue
        spec = content["spec"]
        record = PanelRecord(
            sample_id=report.sample_id,
            true_label="mixed" if spec.n_strains > 1 else "pure",
            true_proportions=sorted(spec.proportions, reverse=True),
            lr_statistic=report.lr_statistic,
            call=report.call,
            estimated_proportions=report.em_proportions,
            snp_distance=2 * spec.snps_per_strain,
            p_value=chi2_survival(report.lr_statistic))
        samples.append({"directory": directory,
                        "truth": content["truth"],
                        "spec": spec,
                        "report": report,
                        "record": record})
    logging.info("\t Collected {} samples from {}".format(len(samples),
                                                          panel_dir))
    return samples


def _separation_scores(sample: dict) -> dict:
    """ confusion matrix and consensus mismatches of one sample """
    directory = sample["directory"]
    spec = sample["spec"]
    truth = sample["truth"]
    report = sample["report"]
    scores = {}
    assignment_path = os.path.join(directory, "assignments.tsv")
    if os.path.isfile(assignment_path) and spec.n_strains > 1:
        provenance = rank_provenance(truth.read_provenance,
                                     spec.proportions)
        matrix = confusion_matrix(read_assignment_table(assignment_path),
                                  provenance, n_strains=spec.n_strains)
        scores["confusion"] = matrix
    consensus_path = os.path.join(directory,
                                  report.sample_id + ".consensus.fasta")
    if os.path.isfile(consensus_path):
        sequences = import_consensus(consensus_path)
        order = sorted(range(spec.n_strains),
                       key=lambda strain: -spec.proportions[strain])
        if len(sequences) == spec.n_strains:
            all_snps = sorted({position for snps in truth.snp_positions
                               for position, base in snps})
            scores["consensus_mismatches"] = [
                consensus_mismatches(sequence,
                                     truth.strain_genomes[strain],
                                     all_snps)
                for sequence, strain in zip(sequences, order)]
    return scores


def evaluate_panel(panel_dir: str, output_dir: str) -> dict:
    """
        Scores a panel of simulated samples and writes
        evaluation.json, roc_curve.tsv, proportions.tsv,
        alpha_calibration.tsv and one confusion_<sample>.tsv per
        separated sample into output_dir.

        :param panel_dir: directory with one sub directory per sample
        :type panel_dir: str
        :param output_dir: target directory
        :type output_dir: str

        :return: - **summary** (dict) - content of evaluation.json, \
            "tables" holds the written data frames
    """
    os.makedirs(output_dir, exist_ok=True)
    samples = collect_panel(panel_dir)
    records = [sample["record"] for sample in samples]
    summary = {"n_samples": len(records), "warnings": []}
    tables = {}

    # detection
    labels = [record.true_label for record in records]
    if "mixed" in labels and "pure" in labels:
        curve, auc = roc_auc([record.lr_statistic for record in records],
                             labels)
        summary["auc"] = auc
        tables["roc_curve"] = pandas.DataFrame(curve, columns=["fpr", "tpr"])
    else:
        summary["auc"] = None
        summary["warnings"].append("ROC analysis requires pure and mixed "
                                   "samples")
    summary["detected_mixed"] = sum(
        record.call == "mixed" for record in records
        if record.true_label == "mixed")
    summary["n_mixed"] = labels.count("mixed")
    summary["detected_pure"] = sum(
        record.call == "pure" for record in records
        if record.true_label == "pure")
    summary["n_pure"] = labels.count("pure")

    # proportion estimation, samples wrongly called pure are excluded
    estimated = [record for record in records
                 if record.true_label == "mixed" and record.call == "mixed"
                 and record.estimated_proportions]
    tables["proportions"] = pandas.DataFrame(
        [{"sample_id": record.sample_id,
          "true_major": _major(record.true_proportions),
          "estimated_major": _major(record.estimated_proportions)
          if record.estimated_proportions else np.nan,
          "call": record.call,
          "true_label": record.true_label,
          "lr_statistic": record.lr_statistic}
         for record in records],
        columns=["sample_id", "true_major", "estimated_major", "call",
                 "true_label", "lr_statistic"])
    if estimated:
        summary["rmse"] = rmse([record.true_proportions
                                for record in estimated],
                               [record.estimated_proportions
                                for record in estimated])
        summary["max_deviation"] = float(max(
            abs(_major(record.true_proportions)
                - _major(record.estimated_proportions))
            for record in estimated))
    else:
        summary["rmse"] = None
        summary["max_deviation"] = None
    summary["missed_mixed"] = [record.sample_id for record in records
                               if record.true_label == "mixed"
                               and record.call == "pure"]
    unestimated = [record.sample_id for record in records
                   if record.call == "mixed"
                   and not record.estimated_proportions]
    if unestimated:
        summary["warnings"].append(
            "mixed calls without proportion estimate: "
            + ", ".join(unestimated))

    # separation
    summary["separation"] = {}
    for sample in samples:
        scores = _separation_scores(sample)
        sample_id = sample["record"].sample_id
        entry = {}
        if "confusion" in scores:
            frame = scores["confusion"].to_frame()
            tables["confusion_" + sample_id] = frame
            entry["confusion"] = scores["confusion"].counts.tolist()
        if "consensus_mismatches" in scores:
            entry["consensus_mismatches"] = scores["consensus_mismatches"]
        if entry:
            summary["separation"][sample_id] = entry

    tables["alpha_calibration"] = alpha_calibration_grid(records)
    summary["records"] = [asdict(record) for record in records]

    # output files
    for name, table in tables.items():
        table.to_csv(os.path.join(output_dir, name + ".tsv"), sep="\t",
                     index=name.startswith("confusion_")
                     or name == "alpha_calibration")
    with open(os.path.join(output_dir, "evaluation.json"), "w") as file:
        json.dump(summary, file, indent=2, default=_json_default)
    logging.info("\t Evaluated {} samples, AUC {}, RMSE {}".format(
        len(records), summary["auc"], summary["rmse"]))
    summary["tables"] = tables
    return summary


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError("not JSON serializable: " + repr(value))
