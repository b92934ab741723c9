# -*- coding: utf-8 -*-
"""
    Import of the region include-list (GFF3) restricting the analysis
    to parts of the reference, e.g. to a set of genes.
"""
import logging


class RegionParseError(ValueError):
    """
        Raised for a malformed region line. The 1-based line number of
        the offending line is stored in ``line_number``.
    """
    def __init__(self, message: str, line_number: int):
        super().__init__("line {}: {}".format(line_number, message))
        self.line_number = line_number


def merge_intervals(intervals: list) -> list:
    """
        Sorts half-open intervals and merges the overlapping ones.

        :param intervals: (start, end) tuples
        :type intervals: list

        :return: - **merged** (list) - sorted, disjoint intervals
    """
    merged = []
    for start, end in sorted(intervals):
        if merged and start < merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


def parse_regions(stream) -> list:
    """
        Reads the features of a GFF3 file. Every feature line is
        converted from its 1-based, inclusive coordinates into a 0-based
        half-open interval, overlapping intervals are merged.

        :param stream: iterable of text lines
        :type stream: iterable

        :return: - **regions** (list) - sorted (start, end) tuples
        :raise: - **RegionParseError** - malformed feature line
    """
    intervals = []
    for line_number, line in enumerate(stream, start=1):
        # sequences appended to the annotation are not part of it
        if line.startswith("##FASTA"):
            break
        if line.startswith("#") or not line.strip():
            continue
        columns = line.rstrip("\n").split("\t")
        if len(columns) < 5:
            raise RegionParseError(
                "expected at least 5 columns, found {}".format(
                    len(columns)), line_number)
        try:
            start = int(columns[3])
            end = int(columns[4])
        except ValueError:
            raise RegionParseError("non-integer start or end",
                                   line_number) from None
        if start < 1:
            raise RegionParseError("start has to be at least 1",
                                   line_number)
        if start > end:
            raise RegionParseError("start {} exceeds end {}".format(
                start, end), line_number)
        intervals.append((start - 1, end))
    regions = merge_intervals(intervals)
    logging.info("\t Imported {} features merged into {} regions".format(
        len(intervals), len(regions)))
    return regions


def import_regions(filepath: str) -> list:
    """ reads a GFF3 file from disk, see parse_regions """
    logging.info("\t Importing regions " + str(filepath))
    with open(filepath, "r") as region_file:
        return parse_regions(region_file)


def whole_genome_region(ref_length: int) -> list:
    """ region list used if no region file is given """
    return [(0, ref_length)]


def region_length(regions: list) -> int:
    """ number of reference positions inside the regions """
    return sum(end - start for start, end in regions)
