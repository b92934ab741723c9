import os

import pytest

TEST_DIR = os.path.join(os.path.dirname(__file__),
                        "test_preprocessing_import_regions")


def test_import_regions():
    """
        Five genes, two pairs of them overlapping, result in three
        0-based half-open regions. The appended sequence is ignored.
    """
    from program_files.preprocessing.import_regions import import_regions, \
        region_length

    regions = import_regions(os.path.join(TEST_DIR, "five_genes.gff3"))

    assert regions == [(99, 300), (499, 700), (899, 1000)]
    assert region_length(regions) == 201 + 201 + 101


def test_merge_intervals():
    """ adjacent intervals stay separate, overlapping ones are merged """
    from program_files.preprocessing.import_regions import merge_intervals

    assert merge_intervals([(10, 20), (0, 5), (5, 8), (15, 30), (16, 18)]) \
        == [(0, 5), (5, 8), (10, 30)]
    assert merge_intervals([]) == []


def test_parse_regions_errors():
    from program_files.preprocessing.import_regions import \
        RegionParseError, parse_regions

    malformed = ["chrom\tsource\tgene\t100\n",
                 "chrom\tsource\tgene\tstart\t200\t.\t+\t.\t.\n",
                 "chrom\tsource\tgene\t0\t200\t.\t+\t.\t.\n",
                 "chrom\tsource\tgene\t300\t200\t.\t+\t.\t.\n"]
    for line in malformed:
        with pytest.raises(RegionParseError) as error:
            parse_regions(["##gff-version 3\n", line])
        assert error.value.line_number == 2


def test_single_base_feature():
    from program_files.preprocessing.import_regions import parse_regions

    assert parse_regions(["chrom\t.\tSNP\t42\t42\t.\t+\t.\t.\n"]) \
        == [(41, 42)]


def test_whole_genome_region():
    from program_files.preprocessing.import_regions import \
        whole_genome_region

    assert whole_genome_region(4411532) == [(0, 4411532)]
