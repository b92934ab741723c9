import os

import numpy as np
import pytest


def test_generate_reference():
    from program_files.simulation.simulate_sample import generate_reference

    reference = generate_reference(50_000, seed=1)

    assert len(reference) == 50_000
    assert set(reference) == set("ACGT")
    gc = (reference.count("G") + reference.count("C")) / len(reference)
    assert gc == pytest.approx(0.5, abs=0.02)
    assert generate_reference(50_000, seed=1) == reference
    assert generate_reference(50_000, seed=2) != reference
    with pytest.raises(ValueError):
        generate_reference(0, seed=1)


def test_mutate_strain():
    from program_files.simulation.simulate_sample import \
        generate_reference, mutate_strain

    reference = generate_reference(1000, seed=2)
    genome, snps = mutate_strain(reference, 10, seed=3)

    assert len(genome) == len(reference)
    differences = [position for position, (a, b)
                   in enumerate(zip(reference, genome)) if a != b]
    assert differences == [position for position, base in snps]
    assert all(genome[position] == base for position, base in snps)
    assert mutate_strain(reference, 0, seed=3) == (reference, [])
    with pytest.raises(ValueError):
        mutate_strain(reference, 1001, seed=3)


def test_two_strains_are_twenty_snps_apart():
    from program_files.simulation.simulate_sample import SyntheticSpec, \
        build_ground_truth, generate_reference

    spec = SyntheticSpec(n_strains=2, snps_per_strain=10,
                         proportions=[0.5, 0.5])
    truth = build_ground_truth(generate_reference(50_000, seed=0), spec)
    first, second = truth.strain_genomes

    assert sum(a != b for a, b in zip(first, second)) == 20


def test_spec_validation():
    from program_files.simulation.simulate_sample import SyntheticSpec

    invalid = [{"n_strains": 4, "proportions": [0.25] * 4},
               {"proportions": [0.7, 0.2]},
               {"proportions": [0.7, 0.3, 0.0]},
               {"proportions": [1.2, -0.2]},
               {"snps_per_strain": 0},
               {"read_length": 0},
               {"depth": 0},
               {"error_rate": 0.8},
               {"ref_length": 0}]
    for parameters in invalid:
        with pytest.raises(ValueError):
            SyntheticSpec(**parameters)
    with pytest.raises(ValueError):
        SyntheticSpec.from_dict({"coverage": 30})
    assert SyntheticSpec.from_dict({"depth": 60}).depth == 60


def test_simulate_sample_depth_and_proportions():
    """
        Depth 60 gives a mean pileup depth of about 60, the 70:30 split
        shows in the read provenance.
    """
    from program_files.preprocessing.pileup import count_bases
    from program_files.simulation.simulate_sample import SyntheticSpec, \
        simulate_sample

    spec = SyntheticSpec(ref_length=20_000, snps_per_strain=20, depth=60,
                         read_length=100, proportions=[0.7, 0.3], seed=4)
    reference, truth, reads = simulate_sample(spec)

    depth = count_bases(reads, spec.ref_length).sum(axis=1)
    assert depth.mean() == pytest.approx(60, rel=0.1)
    assert len(reads) > 10_000
    shares = np.bincount(list(truth.read_provenance.values())) / len(reads)
    assert shares[0] == pytest.approx(0.7, abs=0.02)
    assert all(0 <= read.ref_start and read.ref_end <= spec.ref_length
               for read in reads)
    assert [read.ref_start for read in reads] \
        == sorted(read.ref_start for read in reads)


def test_simulated_alt_frequency(mixed_sample):
    """
        Alt alleles of the minor strain show up at about 30 % minus the
        share lost to sequencing errors.
    """
    from program_files.preprocessing.pileup import BASES, count_bases

    spec = mixed_sample["spec"]
    counts = count_bases(mixed_sample["reads"], spec.ref_length)
    first, second = mixed_sample["truth"].snp_positions
    private = [(position, base) for position, base in second
               if position not in dict(first)]
    alt = sum(counts[position, BASES.index(base)]
              for position, base in private)
    total = sum(counts[position].sum() for position, base in private)
    expected = 0.3 * (1 - 4 / 3 * spec.error_rate) + spec.error_rate / 3
    frequency = alt / total
    bound = 4 * np.sqrt(expected * (1 - expected) / total)
    # the realized strain share differs from 0.3 by a few thousandths
    assert abs(frequency - expected) <= bound + 0.01


def test_simulation_is_deterministic():
    from program_files.simulation.simulate_sample import SyntheticSpec, \
        simulate_sample

    spec = SyntheticSpec(ref_length=2000, snps_per_strain=5, depth=10,
                         seed=9, reference_seed=2)
    first = simulate_sample(spec)
    second = simulate_sample(spec)

    assert first[0] == second[0]
    assert first[1] == second[1]
    assert first[2] == second[2]


def test_shared_reference_seed():
    """
        Samples of one reference seed share reference and strains, the
        read seed changes the reads only.
    """
    from program_files.simulation.simulate_sample import SyntheticSpec, \
        simulate_sample

    first = simulate_sample(SyntheticSpec(ref_length=2000, snps_per_strain=5,
                                          depth=5, seed=1))
    second = simulate_sample(SyntheticSpec(ref_length=2000, snps_per_strain=5,
                                           depth=5, seed=2))

    assert first[0] == second[0]
    assert first[1].snp_positions == second[1].snp_positions
    assert first[1].strain_genomes == second[1].strain_genomes
    assert [read.bases for read in first[2]] \
        != [read.bases for read in second[2]]

    other = simulate_sample(SyntheticSpec(ref_length=2000, snps_per_strain=5,
                                          depth=5, seed=1, reference_seed=3))
    assert other[0] != first[0]


def test_write_sample(tmp_path):
    from program_files.preprocessing.import_alignment import \
        import_alignment
    from program_files.processing.consensus import import_reference
    from program_files.simulation.simulate_sample import SyntheticSpec, \
        read_truth, simulate_sample, write_sample

    spec = SyntheticSpec(ref_length=3000, snps_per_strain=5, depth=5, seed=6)
    reference, truth, reads = simulate_sample(spec)
    directory = str(tmp_path / "sample")
    write_sample(directory, reference, reads, truth, spec)

    assert sorted(os.listdir(directory)) == ["reads.sam", "reference.fasta",
                                             "truth.json"]
    assert import_reference(os.path.join(directory, "reference.fasta")) \
        == ("reference", reference)
    imported, header = import_alignment(os.path.join(directory, "reads.sam"))
    assert header.lengths == (3000,)
    assert [(read.read_id, read.ref_start, read.bases) for read in imported] \
        == [(read.read_id, read.ref_start, read.bases) for read in reads]
    content = read_truth(os.path.join(directory, "truth.json"))
    assert content["spec"] == spec
    assert content["truth"] == truth
