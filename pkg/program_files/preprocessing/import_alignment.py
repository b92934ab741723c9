# -*- coding: utf-8 -*-
"""
    Import of short read alignments.

    Reads the alignment of a single sample against a single reference
    genome through pysam, keeps the records usable for pileup and read
    assignment and writes record subsets back as SAM files.
"""
from array import array
from dataclasses import dataclass, field
import logging
import os

import pysam

# pysam CIGAR operation codes in the letters used for pileup, "=" and
# "X" are sequence match / mismatch and treated as "M"
CIGAR_LETTERS = {pysam.CMATCH: "M", pysam.CINS: "I", pysam.CDEL: "D",
                 pysam.CSOFT_CLIP: "S", pysam.CEQUAL: "M",
                 pysam.CDIFF: "M"}
CIGAR_CODES = {"M": pysam.CMATCH, "I": pysam.CINS, "D": pysam.CDEL,
               "S": pysam.CSOFT_CLIP}
QUERY_CONSUMING = {"M", "I", "S"}
REFERENCE_CONSUMING = {"M", "D"}

# phred quality used for records without qualities
PLACEHOLDER_QUALITY = 30


class AlignmentParseError(ValueError):
    """
        Raised for a malformed alignment record. The 1-based line
        number of the offending line is stored in ``line_number``.
    """
    def __init__(self, message: str, line_number: int):
        super().__init__("line {}: {}".format(line_number, message))
        self.line_number = line_number


@dataclass
class AlignedRead:
    """
        One mapped read of a read pair.

        ``ref_start`` is the 0-based leftmost aligned reference
        position, ``cigar`` a list of (operation, length) tuples with
        operations out of M, I, D and S. The remaining record fields
        are kept to write the read back unchanged.
    """
    read_id: str
    mate_flag: str
    ref_start: int
    cigar: list
    bases: str
    base_qualities: list
    map_quality: int
    mate_is_mapped: bool
    is_mapped: bool = True
    flag: int = 0
    ref_name: str = "reference"
    cigartuples: list = field(default=None, repr=False, compare=False)
    mate_ref_start: int = field(default=-1, repr=False, compare=False)
    template_length: int = field(default=0, repr=False, compare=False)
    tags: list = field(default_factory=list, repr=False, compare=False)

    def aligned_blocks(self) -> list:
        """
            Returns the blocks of the read aligned base to base against
            the reference.

            :return: - **blocks** (list) - (reference position, read \
                position, length) for every "M" operation
        """
        blocks = []
        ref_pos = self.ref_start
        query_pos = 0
        for operation, length in self.cigar:
            if operation == "M":
                blocks.append((ref_pos, query_pos, length))
            if operation in REFERENCE_CONSUMING:
                ref_pos += length
            if operation in QUERY_CONSUMING:
                query_pos += length
        return blocks

    @property
    def ref_end(self) -> int:
        """ exclusive end of the reference span covered by the read """
        return self.ref_start + sum(length for operation, length
                                    in self.cigar
                                    if operation in REFERENCE_CONSUMING)


def convert_cigar(cigartuples: list) -> list:
    """
        Translates pysam CIGAR tuples into (operation, length) tuples.
        Hard clips are dropped.

        :param cigartuples: (operation code, length) tuples of an \
            AlignedSegment
        :type cigartuples: list

        :return: - **operations** (list) - (operation, length) tuples
        :raise: - **ValueError** - skipped region, padding or back \
            operation
    """
    operations = []
    for code, length in cigartuples:
        if code == pysam.CHARD_CLIP:
            continue
        if code not in CIGAR_LETTERS:
            raise ValueError("unsupported CIGAR operation "
                             + "MIDNSHP=XB"[code])
        operations.append((CIGAR_LETTERS[code], length))
    return operations


def read_from_segment(segment: pysam.AlignedSegment,
                      line_number: int) -> AlignedRead:
    """
        Converts one pysam record. Returns None for records which are
        unmapped, secondary or supplementary.

        :param segment: alignment record
        :type segment: pysam.AlignedSegment
        :param line_number: 1-based line number used in error messages
        :type line_number: int

        :return: - **read** (AlignedRead) - converted record or None
        :raise: - **AlignmentParseError** - record unusable for pileup
    """
    if segment.is_unmapped or segment.is_secondary \
            or segment.is_supplementary:
        return None
    if segment.reference_id < 0:
        raise AlignmentParseError("mapped record without reference",
                                  line_number)
    try:
        cigar = convert_cigar(segment.cigartuples or [])
    except ValueError as error:
        raise AlignmentParseError(str(error), line_number) from None
    if not cigar:
        raise AlignmentParseError("mapped record without CIGAR",
                                  line_number)
    bases = segment.query_sequence
    if bases is None:
        raise AlignmentParseError("mapped record without sequence",
                                  line_number)
    query_length = sum(length for operation, length in cigar
                       if operation in QUERY_CONSUMING)
    if query_length != len(bases):
        raise AlignmentParseError(
            "CIGAR describes {} read bases, sequence has {}".format(
                query_length, len(bases)), line_number)
    qualities = segment.query_qualities
    if qualities is None:
        qualities = [PLACEHOLDER_QUALITY] * len(bases)
    # reads without a mate carry no mate constraint
    mate_is_mapped = not segment.mate_is_unmapped \
        if segment.is_paired else True
    return AlignedRead(
        read_id=segment.query_name,
        mate_flag="second" if segment.is_read2 else "first",
        ref_start=segment.reference_start,
        cigar=cigar,
        bases=bases.upper(),
        base_qualities=list(qualities),
        map_quality=segment.mapping_quality,
        mate_is_mapped=mate_is_mapped,
        flag=segment.flag,
        ref_name=segment.reference_name,
        cigartuples=list(segment.cigartuples),
        mate_ref_start=segment.next_reference_start,
        template_length=segment.template_length,
        tags=segment.get_tags(with_value_type=True),
    )


def _keep(read: AlignedRead, min_map_quality: int) -> bool:
    return read is not None and read.mate_is_mapped \
        and read.map_quality >= min_map_quality


def parse_alignment(stream, min_map_quality: int = 1) -> list:
    """
        Parses the lines of a SAM file. Header lines are collected
        into the pysam header the records are parsed against, records
        which are unmapped, whose mate is unmapped or whose mapping
        quality is below min_map_quality are excluded.

        :param stream: iterable of text lines (open file, list, ...)
        :type stream: iterable
        :param min_map_quality: minimal mapping quality of a kept \
            record
        :type min_map_quality: int

        :return: - **reads** (list) - AlignedRead objects in input \
            order
        :raise: - **AlignmentParseError** - malformed record
    """
    header_lines = []
    header = None
    reads = []
    excluded = 0
    for line_number, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if line.startswith("@"):
            header_lines.append(line)
            continue
        if not line.strip():
            continue
        if header is None and header_lines:
            header = pysam.AlignmentHeader.from_text(
                "".join(header_line + "\n" for header_line in header_lines))
        elif header is None:
            header = pysam.AlignmentHeader.from_dict({"HD": {"VN": "1.6"}})
        columns = line.split("\t")
        if len(columns) < 11:
            raise AlignmentParseError(
                "expected 11 columns, found {}".format(len(columns)),
                line_number)
        if columns[2] != "*" and columns[2] not in header.references:
            raise AlignmentParseError(
                "reference {} missing in the header".format(columns[2]),
                line_number)
        try:
            segment = pysam.AlignedSegment.fromstring(line, header)
        except ValueError as error:
            raise AlignmentParseError(str(error), line_number) from None
        read = read_from_segment(segment, line_number)
        if not _keep(read, min_map_quality):
            excluded += 1
            continue
        reads.append(read)
    logging.info("\t Imported {} aligned reads, {} records excluded".format(
        len(reads), excluded))
    return reads


def first_reference(header: pysam.AlignmentHeader) -> tuple:
    """
        Name and length of the first reference sequence of a header,
        (None, None) without @SQ lines.
    """
    if header is None or not header.nreferences:
        return None, None
    return header.references[0], header.lengths[0]


def import_alignment(filepath: str, min_map_quality: int = 1) -> tuple:
    """
        Reads a SAM (or BAM) file from disk.

        :param filepath: path of the alignment file
        :type filepath: str
        :param min_map_quality: minimal mapping quality of a kept \
            record
        :type min_map_quality: int

        :return: - **reads** (list) - converted AlignedRead objects
                 - **header** (pysam.AlignmentHeader) - header of the \
                    file, None for an empty file
        :raise: - **FileNotFoundError** - missing file
                - **AlignmentParseError** - malformed record
    """
    logging.info("\t Importing alignment " + str(filepath))
    if not os.path.isfile(filepath):
        raise FileNotFoundError("alignment file {} not found".format(
            filepath))
    if os.path.getsize(filepath) == 0:
        logging.warning("\t Alignment file {} is empty".format(filepath))
        return [], None
    reads = []
    excluded = 0
    with pysam.AlignmentFile(filepath, "r", check_sq=False) as sam_file:
        header = sam_file.header
        # SAM records follow the header lines one per line
        offset = len(str(header).splitlines())
        records = sam_file.fetch(until_eof=True)
        record_number = 0
        while True:
            try:
                segment = next(records)
            except StopIteration:
                break
            except (OSError, ValueError) as error:
                raise AlignmentParseError(
                    str(error), offset + record_number + 1) from None
            record_number += 1
            read = read_from_segment(segment, offset + record_number)
            if not _keep(read, min_map_quality):
                excluded += 1
                continue
            reads.append(read)
    logging.info("\t Imported {} aligned reads, {} records excluded".format(
        len(reads), excluded))
    return reads, header


def alignment_header(ref_name: str, ref_length: int
                     ) -> pysam.AlignmentHeader:
    """ minimal coordinate sorted SAM header for a single reference """
    return pysam.AlignmentHeader.from_dict({
        "HD": {"VN": "1.6", "SO": "coordinate"},
        "SQ": [{"SN": ref_name, "LN": ref_length}]})


def to_segment(read: AlignedRead, header: pysam.AlignmentHeader
               ) -> pysam.AlignedSegment:
    """
        Builds the pysam record of a read against the given header.

        :param read: read to be converted
        :type read: AlignedRead
        :param header: header the record refers to
        :type header: pysam.AlignmentHeader

        :return: - **segment** (pysam.AlignedSegment) - the record
        :raise: - **ValueError** - reference of the read missing in \
            the header
    """
    if read.ref_name not in header.references:
        raise ValueError("reference {} missing in the header".format(
            read.ref_name))
    segment = pysam.AlignedSegment(header)
    segment.query_name = read.read_id
    segment.flag = read.flag
    if read.mate_flag == "second" and not segment.is_read2:
        segment.is_paired = True
        segment.is_read2 = True
    segment.reference_id = header.get_tid(read.ref_name)
    segment.reference_start = read.ref_start
    segment.mapping_quality = read.map_quality
    segment.cigartuples = read.cigartuples or [
        (CIGAR_CODES[operation], length) for operation, length in read.cigar]
    segment.query_sequence = read.bases
    # qualities are reset by assigning the sequence
    segment.query_qualities = array("B", read.base_qualities)
    if segment.is_paired:
        segment.next_reference_id = segment.reference_id
        segment.next_reference_start = read.mate_ref_start \
            if read.mate_ref_start >= 0 else read.ref_start
    segment.template_length = read.template_length
    segment.set_tags(read.tags)
    return segment


def write_alignment(reads: list, path: str,
                    header: pysam.AlignmentHeader) -> None:
    """
        Writes reads as a SAM file.

        :param reads: AlignedRead objects to be written
        :type reads: list
        :param path: target file
        :type path: str
        :param header: header of the written file
        :type header: pysam.AlignmentHeader
    """
    with pysam.AlignmentFile(path, "w", header=header) as sam_file:
        for read in reads:
            sam_file.write(to_segment(read, header))
    logging.info("\t Wrote {} reads to {}".format(len(reads), path))
