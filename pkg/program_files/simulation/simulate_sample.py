# -*- coding: utf-8 -*-
"""
    Generation of synthetic single and multi strain samples.

    A random reference is mutated by independent random base
    substitutions per strain, reads are drawn from the strain genomes
    in the requested proportions with a uniform substitution error and
    emitted already aligned to the reference. The ground truth (strain
    genomes, SNPs and the strain of every read) is kept for evaluation.
"""
from dataclasses import asdict, dataclass, field
import json
import logging
import os

import numpy as np
from Bio.Seq import Seq
from Bio.SeqRecord import SeqRecord
from Bio import SeqIO
import pysam

from program_files.preprocessing.import_alignment import AlignedRead, \
    PLACEHOLDER_QUALITY, alignment_header, write_alignment
from program_files.preprocessing.pileup import BASES

LETTERS = np.frombuffer("".join(BASES).encode("ascii"), dtype=np.uint8)
REFERENCE_NAME = "reference"
# proper pair, both mates mapped, first mate
READ_FLAG = pysam.FPAIRED | pysam.FPROPER_PAIR | pysam.FREAD1
READ_MAP_QUALITY = 60


@dataclass
class SyntheticSpec:
    """
        Recipe of a synthetic sample. All strains and the reference are
        derived from ``reference_seed``, reads and their errors from
        ``seed``. Samples sharing the reference seed therefore share
        reference and strain genomes and differ in their reads only.
    """
    ref_length: int = 50_000
    n_strains: int = 2
    snps_per_strain: int = 100
    proportions: list = field(default_factory=lambda: [0.7, 0.3])
    depth: float = 100.0
    read_length: int = 150
    error_rate: float = 0.02
    seed: int = 0
    reference_seed: int = 0

    def __post_init__(self):
        self.proportions = [float(value) for value in self.proportions]
        if self.ref_length < 1:
            raise ValueError("ref_length has to be positive")
        if not 1 <= self.n_strains <= 3:
            raise ValueError("n_strains has to be 1, 2 or 3")
        if len(self.proportions) != self.n_strains:
            raise ValueError("one proportion per strain is required")
        if any(value < 0 for value in self.proportions) \
                or abs(sum(self.proportions) - 1) > 1e-9:
            raise ValueError("proportions have to be non-negative and sum "
                             "up to 1")
        if self.snps_per_strain < 1 \
                or self.snps_per_strain > self.ref_length:
            raise ValueError("snps_per_strain has to be within "
                             "[1, ref_length]")
        if not 0 < self.read_length <= self.ref_length:
            raise ValueError("read_length has to be within "
                             "(0, ref_length]")
        if self.depth <= 0:
            raise ValueError("depth has to be positive")
        if not 0 <= self.error_rate < 0.75:
            raise ValueError("error_rate has to be within [0, 0.75)")

    @classmethod
    def from_dict(cls, values: dict) -> "SyntheticSpec":
        unknown = set(values) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError("unknown sample parameters: "
                             + ", ".join(sorted(unknown)))
        return cls(**values)


@dataclass
class GroundTruth:
    strain_genomes: list
    snp_positions: list
    read_provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"strain_genomes": self.strain_genomes,
                "snp_positions": [[[int(position), base]
                                   for position, base in snps]
                                  for snps in self.snp_positions],
                "read_provenance": self.read_provenance}


def _child_seeds(seed: int, count: int) -> list:
    """ independent integer seeds derived from one seed """
    return [int(child.generate_state(1)[0])
            for child in np.random.SeedSequence(seed).spawn(count)]


def generate_reference(length: int, seed: int) -> str:
    """
        Uniform random sequence over A, C, G and T.

        :raise: - **ValueError** - non-positive length
    """
    if length < 1:
        raise ValueError("the reference length has to be positive")
    rng = np.random.default_rng(seed)
    return LETTERS[rng.integers(0, 4, size=length)].tobytes().decode()


def mutate_strain(reference: str, n_snps: int, seed: int) -> tuple:
    """
        Substitutes the bases at n_snps distinct, uniformly chosen
        positions by a uniformly chosen different base.

        :param reference: reference sequence
        :type reference: str
        :param n_snps: number of substitutions
        :type n_snps: int
        :param seed: random seed
        :type seed: int

        :return: - **genome** (str) - mutated sequence
                 - **snps** (list) - sorted (position, alt base) tuples
        :raise: - **ValueError** - more SNPs than positions
    """
    if not 0 <= n_snps <= len(reference):
        raise ValueError("n_snps has to be within [0, reference length]")
    rng = np.random.default_rng(seed)
    codes = np.array([BASES.index(base) for base in reference],
                     dtype=np.int64)
    positions = np.sort(rng.choice(len(reference), size=n_snps,
                                   replace=False))
    codes[positions] = (codes[positions]
                        + rng.integers(1, 4, size=n_snps)) % 4
    genome = LETTERS[codes].tobytes().decode()
    snps = [(int(position), genome[position]) for position in positions]
    return genome, snps


def build_ground_truth(reference: str, spec: SyntheticSpec) -> GroundTruth:
    """ mutates one genome per strain from the reference """
    seeds = _child_seeds(spec.reference_seed, 2)
    strain_genomes, snp_positions = [], []
    for strain in range(spec.n_strains):
        # strain seeds mix in the strain index so that two strains of
        # one sample differ
        genome, snps = mutate_strain(
            reference=reference, n_snps=spec.snps_per_strain,
            seed=[seeds[1], strain])
        strain_genomes.append(genome)
        snp_positions.append(snps)
    return GroundTruth(strain_genomes=strain_genomes,
                       snp_positions=snp_positions)


def simulate_reads(truth: GroundTruth, spec: SyntheticSpec) -> tuple:
    """
        Draws reads from the strain genomes.

        The number of reads is apportioned to the strains by a
        multinomial draw. Read starts are uniform over all placements
        overlapping the reference, reads reaching over an end are
        truncated there, giving a uniform depth up to the ends. Each
        base is replaced by a uniformly chosen different base with
        probability error_rate.

        :param truth: strain genomes
        :type truth: GroundTruth
        :param spec: sample recipe
        :type spec: SyntheticSpec

        :return: - **reads** (list) - AlignedRead objects sorted by \
                    start position
                 - **provenance** (dict) - read id -> strain index
    """
    rng = np.random.default_rng(_child_seeds(spec.seed, 2)[1])
    ref_length = spec.ref_length
    read_length = spec.read_length
    n_placements = ref_length + read_length - 1
    n_reads = int(round(spec.depth * n_placements / read_length))
    per_strain = rng.multinomial(n_reads, spec.proportions)
    offsets = np.arange(read_length)
    records = []
    for strain, (genome, count) in enumerate(zip(truth.strain_genomes,
                                                 per_strain)):
        codes = np.array([BASES.index(base) for base in genome],
                         dtype=np.int64)
        starts = rng.integers(-(read_length - 1), ref_length, size=count)
        window = starts[:, None] + offsets[None, :]
        inside = (window >= 0) & (window < ref_length)
        bases = codes[np.clip(window, 0, ref_length - 1)]
        errors = rng.random(size=window.shape) < spec.error_rate
        shift = rng.integers(1, 4, size=window.shape)
        bases = np.where(errors, (bases + shift) % 4, bases)
        for row in range(count):
            sequence = LETTERS[bases[row][inside[row]]].tobytes().decode()
            records.append((max(int(starts[row]), 0), strain, row, sequence))
    records.sort(key=lambda record: record[:3])
    reads = []
    provenance = {}
    for number, (start, strain, row, sequence) in enumerate(records):
        read_id = "read{:07d}".format(number + 1)
        provenance[read_id] = strain
        reads.append(AlignedRead(
            read_id=read_id,
            mate_flag="first",
            ref_start=start,
            cigar=[("M", len(sequence))],
            bases=sequence,
            base_qualities=[PLACEHOLDER_QUALITY] * len(sequence),
            map_quality=READ_MAP_QUALITY,
            mate_is_mapped=True,
            flag=READ_FLAG,
            ref_name=REFERENCE_NAME))
    logging.info("\t Simulated {} reads, per strain {}".format(
        len(reads), per_strain.tolist()))
    return reads, provenance


def simulate_sample(spec: SyntheticSpec) -> tuple:
    """
        Generates reference, ground truth and reads of a sample.

        :return: - **reference** (str) -
                 - **truth** (GroundTruth) - including the read \
                    provenance
                 - **reads** (list) - aligned reads
    """
    reference = generate_reference(spec.ref_length,
                                   _child_seeds(spec.reference_seed, 2)[0])
    truth = build_ground_truth(reference, spec)
    reads, truth.read_provenance = simulate_reads(truth, spec)
    return reference, truth, reads


def write_sample(directory: str, reference: str, reads: list,
                 truth: GroundTruth, spec: SyntheticSpec) -> None:
    """
        Writes reference.fasta, reads.sam and truth.json into the
        directory.
    """
    os.makedirs(directory, exist_ok=True)
    SeqIO.write([SeqRecord(Seq(reference), id=REFERENCE_NAME,
                           description="synthetic reference")],
                os.path.join(directory, "reference.fasta"), "fasta")
    write_alignment(reads=reads,
                    path=os.path.join(directory, "reads.sam"),
                    header=alignment_header(REFERENCE_NAME, len(reference)))
    content = {"spec": asdict(spec)}
    content.update(truth.to_dict())
    with open(os.path.join(directory, "truth.json"), "w") as truth_file:
        json.dump(content, truth_file, indent=1)


def read_truth(path: str) -> dict:
    """
        Reads a truth.json file.

        :return: - **truth** (dict) - "spec" (SyntheticSpec) and \
            "truth" (GroundTruth)
        :raise: - **FileNotFoundError** - missing file
    """
    with open(path, "r") as truth_file:
        content = json.load(truth_file)
    truth = GroundTruth(
        strain_genomes=content["strain_genomes"],
        snp_positions=[[(int(position), base) for position, base in snps]
                       for snps in content["snp_positions"]],
        read_provenance={read_id: int(strain) for read_id, strain
                         in content["read_provenance"].items()})
    return {"spec": SyntheticSpec.from_dict(content["spec"]),
            "truth": truth}
