# -*- coding: utf-8 -*-
"""
    Mixed Infection Strain Separator.

    Detects whether a sequenced sample contains more than one strain,
    estimates the strain proportions, splits the reads by strain and
    builds a consensus sequence per strain. Further commands simulate
    samples with known ground truth and evaluate panels of them.

    --------------------------------------------------------------------

    workflow: pileup -> filter -> likelihood ratio test -> mixture
    model -> read assignment -> per strain alignment and consensus
"""
from dataclasses import dataclass, field
import logging
import os
import shutil

from memory_profiler import memory_usage
from oemof.tools import logger
import pandas

from program_files.postprocessing import evaluation, plotting
from program_files.postprocessing.create_results import Report, \
    component_table, write_report, xlsx
from program_files.preprocessing import filter_profile, import_alignment, \
    import_regions, pileup
from program_files.processing import consensus, hypothesis_test, \
    mixture_model, read_assignment
from program_files.simulation import simulate_sample

LOGFILE = "miss.log"


@dataclass
class SampleAnalysis:
    """ intermediate results of the detection and estimation steps """
    sample_id: str
    reads: list
    header: object
    reference_name: str
    reference: str
    profile: filter_profile.SampleProfile
    result: hypothesis_test.HypothesisResult
    variable_sites: list
    call: str
    observations: mixture_model.FrequencyObservations = None
    model: mixture_model.MixtureModel = None
    estimate: mixture_model.ProportionEstimate = None
    warnings: list = field(default_factory=list)


def start_logging(output_dir: str) -> None:
    """ log file miss.log in the output directory plus screen output """
    os.makedirs(output_dir, exist_ok=True)
    logger.define_logging(logpath=output_dir, logfile=LOGFILE)


def sample_name(sam_path: str) -> str:
    """
        Sample id derived from the alignment file name, a file called
        reads.sam takes the name of its directory.
    """
    stem = os.path.splitext(os.path.basename(sam_path))[0]
    if stem == "reads":
        return os.path.basename(os.path.dirname(os.path.abspath(sam_path)))
    return stem


def _warn(analysis_warnings: list, message: str) -> None:
    logging.warning("\t " + message)
    analysis_warnings.append(message)


def analyse_sample(config, sam_path: str, ref_path: str) -> SampleAnalysis:
    """
        Runs pileup, filters, likelihood ratio test and, for mixed
        samples, the mixture model fit.

        :param config: run settings
        :type config: RunConfig
        :param sam_path: SAM file of the sample
        :type sam_path: str
        :param ref_path: FASTA file of the reference
        :type ref_path: str

        :return: - **analysis** (SampleAnalysis) -
    """
    sample_id = config.sample_id or sample_name(sam_path)
    logging.info("\t " + 56 * "*")
    logging.info("\t Analysing sample " + sample_id)
    reference_name, reference = consensus.import_reference(ref_path)
    reads, header = import_alignment.import_alignment(
        filepath=sam_path, min_map_quality=config.min_map_quality)
    return analyse_reads(config, sample_id=sample_id, reads=reads,
                         header=header, reference_name=reference_name,
                         reference=reference)


def analyse_reads(config, sample_id: str, reads: list, header,
                  reference_name: str, reference: str) -> SampleAnalysis:
    """
        Analysis of already imported reads, see analyse_sample. A
        sample without filtered sites or variable sites is called pure
        with the warning "no variant evidence", a failed mixture fit
        keeps the call of the likelihood ratio test without
        proportions.

        :param config: run settings
        :type config: RunConfig
        :param sample_id: name of the sample
        :type sample_id: str
        :param reads: aligned reads
        :type reads: list
        :param header: alignment header, None if unknown
        :type header: pysam.AlignmentHeader
        :param reference_name: name of the reference sequence
        :type reference_name: str
        :param reference: reference sequence
        :type reference: str

        :return: - **analysis** (SampleAnalysis) -
    """
    warnings = []
    _, header_length = import_alignment.first_reference(header)
    if header_length not in (None, len(reference)):
        _warn(warnings, "reference length {} of the alignment header "
              "differs from the FASTA length {}".format(
                  header_length, len(reference)))
    # pileup
    sites = pileup.build_feature_vectors(reads=reads,
                                         ref_length=len(reference),
                                         num_threads=config.num_threads)
    logging.info("\t Memory Usage after pileup: "
                 + str(memory_usage()[0]))
    if config.regions_path is not None:
        regions = import_regions.import_regions(config.regions_path)
    else:
        regions = import_regions.whole_genome_region(len(reference))
    profile = filter_profile.filter_profile(sites=sites, regions=regions,
                                            config=config.filter_config())
    # detection
    if profile.filtered_sites:
        result = hypothesis_test.likelihood_ratio_test(profile=profile,
                                                       alpha=config.alpha)
    else:
        result = hypothesis_test.no_evidence_result(alpha=config.alpha)
    variable = filter_profile.variable_sites(profile)
    analysis = SampleAnalysis(sample_id=sample_id,
                              reads=reads,
                              header=header,
                              reference_name=reference_name,
                              reference=reference,
                              profile=profile,
                              result=result,
                              variable_sites=variable,
                              call=result.call,
                              warnings=warnings)
    if result.call == "pure":
        if not variable:
            _warn(warnings, "no variant evidence")
        return analysis
    if config.n_strains == 1:
        _warn(warnings, "sample called mixed, proportions are not "
              "estimated for a single strain")
        return analysis
    # proportion estimation
    try:
        observations = mixture_model.build_observations(profile)
    except mixture_model.NoVariantEvidenceError:
        _warn(warnings, "no variant evidence")
        analysis.call = "pure"
        return analysis
    n_components = mixture_model.component_count(config.n_strains,
                                                 config.component_mode)
    logging.info("\t Fitting {} {} components ({} mode)".format(
        n_components, config.model_family, config.component_mode))
    try:
        model = mixture_model.em_fit(obs=observations,
                                     K=n_components,
                                     family=config.model_family,
                                     seed=config.seed)
        estimate = mixture_model.proportions_from_model(
            model=model, n_strains=config.n_strains,
            mode=config.component_mode)
    except hypothesis_test.EstimationError as error:
        # the call of the likelihood ratio test stands
        _warn(warnings, "mixture estimation failed: " + str(error))
        analysis.observations = observations
        return analysis
    for message in estimate.warnings:
        warnings.append(message)
    logging.info("\t Estimated proportions: " + ", ".join(
        "{:.4f}".format(value) for value in estimate.proportions))
    analysis.observations = observations
    analysis.model = model
    analysis.estimate = estimate
    return analysis


def build_report(config, analysis: SampleAnalysis,
                 n_assigned_reads: int = 0,
                 mate_consistency: float = None) -> Report:
    result = analysis.result
    estimate = analysis.estimate
    return Report(sample_id=analysis.sample_id,
                  call=analysis.call,
                  lr_statistic=result.lr_statistic,
                  threshold_c=result.threshold_c,
                  alpha=result.alpha,
                  epsilon0=result.epsilon0,
                  epsilon1=result.epsilon1,
                  p_mle=result.p,
                  em_proportions=estimate.proportions
                  if estimate is not None else None,
                  component_table=component_table(analysis.model),
                  n_filtered_sites=len(analysis.profile.filtered_sites),
                  n_variant_sites=len(analysis.variable_sites),
                  n_assigned_reads=n_assigned_reads,
                  warnings=list(analysis.warnings),
                  p_value=result.p_value,
                  n_strains=config.n_strains,
                  model_family=config.model_family,
                  component_mode=config.component_mode,
                  proportion_method=estimate.method
                  if estimate is not None else None,
                  mate_consistency=mate_consistency,
                  mean_depth=analysis.profile.mean_depth)


def _write_detection_files(config, analysis: SampleAnalysis) -> None:
    """ site table, histogram table and figure of the detection """
    output_dir = config.output_dir
    filter_profile.write_site_table(
        profile=analysis.profile,
        path=os.path.join(output_dir, analysis.sample_id + ".sites.tsv"))
    if analysis.model is not None:
        mixture_model.write_histogram_table(
            obs=analysis.observations, model=analysis.model,
            path=os.path.join(output_dir,
                              analysis.sample_id + ".histogram.tsv"))
        if config.plots:
            plotting.plot_frequency_histogram(
                obs=analysis.observations, model=analysis.model,
                path=os.path.join(output_dir,
                                  analysis.sample_id + ".histogram.png"))


def _export_xlsx(config, report: Report, analysis: SampleAnalysis) -> None:
    """ report, mixture components and site table as one xlsx-file """
    tables = {"report": pandas.Series(
        {key: str(value) for key, value in report.to_dict().items()}
    ).to_frame("value"),
        "sites": filter_profile.site_table(analysis.profile)}
    if report.component_table:
        tables["components"] = pandas.DataFrame(report.component_table)
    xlsx(tables=tables,
         filepath=os.path.join(config.output_dir,
                               report.sample_id + ".results.xlsx"))


def cmd_detect(config, sam_path: str, ref_path: str) -> Report:
    """
        Detects a mixed sample and estimates its strain proportions.
        Writes report.json, <sample>.sites.tsv and, for mixed samples,
        <sample>.histogram.tsv into the output directory.

        :param config: run settings
        :type config: RunConfig
        :param sam_path: SAM file of the sample
        :type sam_path: str
        :param ref_path: FASTA file of the reference
        :type ref_path: str

        :return: - **report** (Report) -
    """
    start_logging(config.output_dir)
    analysis = analyse_sample(config, sam_path, ref_path)
    _write_detection_files(config, analysis)
    report = build_report(config, analysis)
    write_report(report, os.path.join(config.output_dir, "report.json"))
    if config.xlsx_results:
        _export_xlsx(config, report, analysis)
    logging.info("\t " + 56 * "-")
    logging.info("\t Detection successfully completed!")
    return report


def cmd_separate(config, sam_path: str, ref_path: str) -> Report:
    """
        Detects and separates the strains of a sample. Writes the
        detection files, one <sample>.strain<k>.sam per strain,
        <sample>.consensus.fasta and, for mixed samples,
        assignments.tsv. A pure sample yields a single strain file
        identical to the input.

        :return: - **report** (Report) -
    """
    start_logging(config.output_dir)
    analysis = analyse_sample(config, sam_path, ref_path)
    _write_detection_files(config, analysis)
    output_dir = config.output_dir
    sample_id = analysis.sample_id
    n_assigned = 0
    mate_agreement = None
    if analysis.estimate is None:
        # nothing to separate
        shutil.copyfile(sam_path, os.path.join(
            output_dir, sample_id + ".strain0.sam"))
        partition = [analysis.reads]
    else:
        separation_model = mixture_model.strain_model(analysis.model,
                                                      analysis.estimate)
        rule = config.assignment_rule
        if separation_model.K > 2 and rule != "map":
            _warn(analysis.warnings, "the {} rule separates two strains "
                  "only, using map".format(rule))
            rule = "map"
        assignments = read_assignment.assign_reads(
            reads=analysis.reads,
            variable_sites=analysis.variable_sites,
            model=separation_model if rule == "map" else None,
            rule=rule)
        n_assigned = len(assignments)
        mate_agreement = read_assignment.mate_consistency(assignments)
        partition = read_assignment.partition_reads(
            reads=analysis.reads, assignments=assignments,
            n_strains=separation_model.K)
        read_assignment.write_assignment_table(
            assignments, os.path.join(output_dir, "assignments.tsv"))
        header = analysis.header
        if import_alignment.first_reference(header)[0] is None:
            header = import_alignment.alignment_header(
                analysis.reference_name, len(analysis.reference))
        for strain, strain_reads in enumerate(partition):
            import_alignment.write_alignment(
                reads=strain_reads,
                path=os.path.join(output_dir, "{}.strain{}.sam".format(
                    sample_id, strain)),
                header=header)
    sequences = {}
    for strain, strain_reads in enumerate(partition):
        sequences["{}_strain{}".format(sample_id, strain)] = \
            consensus.consensus_sequence(strain_reads=strain_reads,
                                         reference=analysis.reference)
    consensus.write_consensus_fasta(
        sequences, os.path.join(output_dir, sample_id + ".consensus.fasta"))
    report = build_report(config, analysis, n_assigned_reads=n_assigned,
                          mate_consistency=mate_agreement)
    write_report(report, os.path.join(output_dir, "report.json"))
    if config.xlsx_results:
        _export_xlsx(config, report, analysis)
    logging.info("\t " + 56 * "-")
    logging.info("\t Separation successfully completed!")
    return report


def cmd_simulate(spec: simulate_sample.SyntheticSpec, output_dir: str
                 ) -> str:
    """
        Simulates a sample and writes reference.fasta, reads.sam and
        truth.json into output_dir.

        :return: - **output_dir** (str) - the sample directory
    """
    start_logging(output_dir)
    reference, truth, reads = simulate_sample.simulate_sample(spec)
    simulate_sample.write_sample(directory=output_dir, reference=reference,
                                 reads=reads, truth=truth, spec=spec)
    logging.info("\t Sample written to " + str(output_dir))
    return output_dir


def cmd_evaluate(panel_dir: str, output_dir: str, plots: bool = False,
                 xlsx_results: bool = False) -> dict:
    """
        Evaluates a panel of analysed simulated samples, see
        evaluation.evaluate_panel.

        :return: - **summary** (dict) -
    """
    start_logging(output_dir)
    summary = evaluation.evaluate_panel(panel_dir=panel_dir,
                                        output_dir=output_dir)
    tables = summary["tables"]
    if plots:
        if "roc_curve" in tables:
            plotting.plot_roc_curve(
                curve=list(tables["roc_curve"].itertuples(index=False,
                                                          name=None)),
                auc=summary["auc"],
                path=os.path.join(output_dir, "roc_curve.png"))
        plotting.plot_proportions(
            table=tables["proportions"],
            path=os.path.join(output_dir, "proportions.png"))
    if xlsx_results:
        xlsx(tables=tables,
             filepath=os.path.join(output_dir, "evaluation.xlsx"))
    return summary
