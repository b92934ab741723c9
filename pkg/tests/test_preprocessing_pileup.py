import numpy as np
import pytest


def test_count_bases(make_read):
    """
        Read pair of the alignment fixture: soft clipped bases are not
        counted, the deleted position stays uncovered.
    """
    from program_files.preprocessing.pileup import count_bases

    reads = [make_read("r1", 0, "ACGTACGTAC"),
             make_read("r1", 4, "GGACGTACTA", mate_flag="second",
                       cigar=[("S", 2), ("M", 6), ("D", 1), ("M", 2)])]
    counts = count_bases(reads, 20)

    assert counts.shape == (20, 4)
    expected = np.zeros((20, 4), dtype=np.int64)
    for position, base in enumerate("ACGTACGTAC"):
        expected[position, "ACGT".index(base)] += 1
    for position, base in zip(range(4, 10), "ACGTAC"):
        expected[position, "ACGT".index(base)] += 1
    expected[11, 3] += 1
    expected[12, 0] += 1
    np.testing.assert_array_equal(counts, expected)


def test_count_bases_skips_n_and_insertions(make_read):
    from program_files.preprocessing.pileup import count_bases

    reads = [make_read("r", 0, "ANGGGT",
                       cigar=[("M", 2), ("I", 3), ("M", 1)])]
    counts = count_bases(reads, 4)

    np.testing.assert_array_equal(counts, [[1, 0, 0, 0], [0, 0, 0, 0],
                                           [0, 0, 0, 1], [0, 0, 0, 0]])


def test_count_bases_outside_reference(make_read):
    from program_files.preprocessing.pileup import count_bases

    with pytest.raises(ValueError):
        count_bases([make_read("r", 8, "ACGT")], 10)


def test_build_feature_vectors(make_read):
    """
        Uncovered positions are absent, the features are the base
        percentages followed by the depth.
    """
    from program_files.preprocessing.pileup import build_feature_vectors

    reads = [make_read("r{}".format(index), 2, bases)
             for index, bases in enumerate(["AC", "AC", "AC", "GC"])]
    sites = build_feature_vectors(reads, 6)

    assert [site.position for site in sites] == [2, 3]
    assert sites[0].count_vector == (3, 0, 1, 0)
    assert sites[0].depth == 4
    assert sites[0].feature_vector() == (75.0, 0.0, 25.0, 0.0, 4)
    assert sites[0].sorted_percent() == [75.0, 25.0, 0.0, 0.0]
    assert sites[1].counts == {"A": 0, "C": 4, "G": 0, "T": 0}


def test_percentages_sum_to_100(mixed_sample):
    from program_files.preprocessing.pileup import build_feature_vectors

    sites = build_feature_vectors(mixed_sample["reads"],
                                  mixed_sample["spec"].ref_length)
    totals = np.array([sum(site.feature_vector()[:4]) for site in sites])
    np.testing.assert_allclose(totals, 100.0)
    assert all(site.depth > 0 for site in sites)


def test_build_feature_vectors_threads(mixed_sample):
    """ splitting the reads over worker processes gives the same pileup """
    from program_files.preprocessing.pileup import build_feature_vectors

    reads = mixed_sample["reads"][:2000]
    ref_length = mixed_sample["spec"].ref_length
    assert build_feature_vectors(reads, ref_length, num_threads=2) \
        == build_feature_vectors(reads, ref_length, num_threads=1)


def test_feature_vectors_from_alignment():
    """
        Eight reads: 6 A and 2 T at the first site, 7 C and 1 G at the
        second one.
    """
    import os
    from program_files.preprocessing.import_alignment import \
        import_alignment
    from program_files.preprocessing.pileup import build_feature_vectors

    reads, header = import_alignment(os.path.join(
        os.path.dirname(__file__), "test_preprocessing_pileup",
        "two_sites.sam"))
    sites = build_feature_vectors(reads, header.lengths[0])

    assert [site.position for site in sites] == [1, 2]
    assert sites[0].feature_vector() == (75.0, 0.0, 0.0, 25.0, 8)
    assert sites[1].feature_vector() == (0.0, 87.5, 12.5, 0.0, 8)
