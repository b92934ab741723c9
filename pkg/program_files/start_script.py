# -*- coding: utf-8 -*-
"""
    Command line interface.

    miss detect    SAM REFERENCE   likelihood ratio test and proportions
    miss separate  SAM REFERENCE   detection plus per strain reads and
                                   consensus sequences
    miss simulate                  synthetic sample with ground truth
    miss evaluate  PANEL_DIR       scores of a panel of simulated samples

    Binary alignments have to be converted to SAM text first, e.g. with
    "samtools view -h sample.bam > sample.sam".
"""
import argparse
import json
import multiprocessing
import sys

from program_files import Mixed_Infection_Strain_Separator as miss
from program_files.run_settings import create_run_config
from program_files.simulation.simulate_sample import SyntheticSpec

EXIT_ERROR = 1


def _add_analysis_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("sam", help="SAM file of the sample (text format)")
    parser.add_argument("reference", help="FASTA file of the reference")
    parser.add_argument("--alpha", type=float,
                        help="significance level of the test "
                             "(default 0.05)")
    parser.add_argument("--kappa", type=float,
                        help="minimal site depth as fraction of the mean "
                             "depth (default 0.70)")
    parser.add_argument("--noise-threshold", type=float,
                        help="minimal allele percentage of a variant "
                             "(default 10)")
    parser.add_argument("--min-map-quality", type=int,
                        help="minimal mapping quality of a read "
                             "(default 1)")
    parser.add_argument("--no-depth-filter", dest="depth_filter",
                        action="store_false", default=None,
                        help="keep sites of any depth")
    parser.add_argument("--strains", type=int, choices=(1, 2, 3),
                        help="number of constituent strains (default 2)")
    parser.add_argument("--model", choices=("binomial", "gaussian"),
                        help="mixture model family (default gaussian)")
    parser.add_argument("--components", choices=("paired", "direct"),
                        help="two components per strain (paired) or one "
                             "(direct) for three strains")
    parser.add_argument("--assignment-rule",
                        choices=("map", "binomial", "vote"),
                        help="read assignment rule (default map)")
    parser.add_argument("--regions", help="GFF3 file of the analysed "
                                          "regions (default whole genome)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--threads", type=int,
                        help="worker processes of the pileup")
    parser.add_argument("--sample-id", help="sample name used in the "
                                            "output file names")
    parser.add_argument("--settings", help="json file with run settings")
    parser.add_argument("--plots", action="store_true", default=None,
                        help="save figures")
    parser.add_argument("--xlsx", action="store_true", default=None,
                        help="save the result tables as xlsx-file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="miss",
        description="Detection and separation of mixed infections from "
                    "whole genome sequencing reads.",
        epilog="Binary alignments have to be converted to SAM text, e.g. "
               "samtools view -h sample.bam > sample.sam")
    commands = parser.add_subparsers(dest="command", required=True)

    detect = commands.add_parser("detect", help="detect a mixed sample")
    _add_analysis_arguments(detect)
    separate = commands.add_parser("separate",
                                   help="separate the reads by strain")
    _add_analysis_arguments(separate)

    simulate = commands.add_parser("simulate",
                                   help="simulate a sample with ground "
                                        "truth")
    simulate.add_argument("--spec", help="json file with the sample "
                                         "parameters, flags override it")
    simulate.add_argument("--ref-length", type=int)
    simulate.add_argument("--strains", type=int, choices=(1, 2, 3))
    simulate.add_argument("--snps", type=int, help="SNPs per strain")
    simulate.add_argument("--proportions", type=float, nargs="+")
    simulate.add_argument("--depth", type=float)
    simulate.add_argument("--read-length", type=int)
    simulate.add_argument("--error-rate", type=float)
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--reference-seed", type=int)
    simulate.add_argument("--out", required=True, help="sample directory")

    evaluate = commands.add_parser("evaluate",
                                   help="evaluate a panel of samples")
    evaluate.add_argument("panel", help="directory with one sub directory "
                                        "per analysed sample")
    evaluate.add_argument("--out", help="output directory (default: the "
                                        "panel directory)")
    evaluate.add_argument("--plots", action="store_true")
    evaluate.add_argument("--xlsx", action="store_true")
    return parser


def _run_config(arguments: argparse.Namespace):
    return create_run_config(settings_path=arguments.settings,
                             alpha=arguments.alpha,
                             kappa=arguments.kappa,
                             noise_threshold=arguments.noise_threshold,
                             min_map_quality=arguments.min_map_quality,
                             depth_filter=arguments.depth_filter,
                             n_strains=arguments.strains,
                             model_family=arguments.model,
                             component_mode=arguments.components,
                             assignment_rule=arguments.assignment_rule,
                             regions_path=arguments.regions,
                             output_dir=arguments.out,
                             seed=arguments.seed,
                             num_threads=arguments.threads,
                             sample_id=arguments.sample_id,
                             plots=arguments.plots,
                             xlsx_results=arguments.xlsx)


def synthetic_spec(arguments: argparse.Namespace) -> SyntheticSpec:
    """ sample parameters of a spec file overridden by the flags """
    values = {}
    if arguments.spec is not None:
        with open(arguments.spec, "r", encoding="utf-8") as spec_file:
            values.update(json.load(spec_file))
    flags = {"ref_length": arguments.ref_length,
             "n_strains": arguments.strains,
             "snps_per_strain": arguments.snps,
             "proportions": arguments.proportions,
             "depth": arguments.depth,
             "read_length": arguments.read_length,
             "error_rate": arguments.error_rate,
             "seed": arguments.seed,
             "reference_seed": arguments.reference_seed}
    values.update({key: value for key, value in flags.items()
                   if value is not None})
    # an even split is assumed if only the number of strains is given
    if "n_strains" in values and "proportions" not in values:
        values["proportions"] = [1 / values["n_strains"]] \
            * values["n_strains"]
    return SyntheticSpec.from_dict(values)


def run(arguments: argparse.Namespace, spec: SyntheticSpec = None) -> None:
    if arguments.command == "detect":
        miss.cmd_detect(_run_config(arguments), arguments.sam,
                        arguments.reference)
    elif arguments.command == "separate":
        miss.cmd_separate(_run_config(arguments), arguments.sam,
                          arguments.reference)
    elif arguments.command == "simulate":
        miss.cmd_simulate(spec or synthetic_spec(arguments), arguments.out)
    elif arguments.command == "evaluate":
        miss.cmd_evaluate(panel_dir=arguments.panel,
                          output_dir=arguments.out or arguments.panel,
                          plots=arguments.plots,
                          xlsx_results=arguments.xlsx)


def main(argv: list = None) -> int:
    """
        Entry point of the miss command. Returns 0 on success, errors
        are reported as one tab separated line
        ERROR<TAB><exception class><TAB><message> on stderr with exit
        code 1. Usage errors, invalid sample parameters included, exit
        with code 2.
    """
    parser = build_parser()
    arguments = parser.parse_args(argv)
    spec = None
    if arguments.command == "simulate":
        try:
            spec = synthetic_spec(arguments)
        except ValueError as error:
            parser.error(str(error))
        except OSError:
            # an unreadable spec file is reported by run
            pass
    try:
        run(arguments, spec)
    except (ValueError, RuntimeError, OSError, KeyError) as error:
        message = str(error).replace("\n", " ").replace("\t", " ")
        print("ERROR\t{}\t{}".format(type(error).__name__, message),
              file=sys.stderr)
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    multiprocessing.freeze_support()
    sys.exit(main())
