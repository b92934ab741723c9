# -*- coding: utf-8 -*-
"""
    Consensus sequences of the separated strains.
"""
import logging

import numpy as np
from Bio.Seq import Seq
from Bio.SeqRecord import SeqRecord
from Bio import SeqIO

from program_files.preprocessing.pileup import BASES, count_bases, \
    encode_bases


def consensus_sequence(strain_reads: list, reference: str) -> str:
    """
        Majority base of the strain's reads at every reference position.
        Positions without coverage keep the reference base, ties
        involving the reference base are resolved to the reference,
        other ties to the first base in the order A, C, G, T.

        :param strain_reads: reads of one strain
        :type strain_reads: list
        :param reference: reference sequence
        :type reference: str

        :return: - **consensus** (str) - sequence of the reference's \
            length
    """
    reference = str(reference).upper()
    counts = count_bases(reads=strain_reads, ref_length=len(reference))
    reference_codes = encode_bases(reference).astype(np.int64)
    maximum = counts.max(axis=1)
    # reference bases other than A, C, G and T are never a majority
    reference_counts = np.where(
        reference_codes < 4,
        counts[np.arange(len(reference)), np.minimum(reference_codes, 3)],
        -1)
    keep_reference = (maximum == 0) | (reference_counts == maximum)
    n_ties = int(np.sum(
        ((counts == maximum[:, None]).sum(axis=1) > 1) & (maximum > 0)))
    if n_ties:
        logging.info("\t {} consensus positions with tied base counts"
                     .format(n_ties))
    majority = np.array(BASES)[np.argmax(counts, axis=1)]
    consensus = np.where(keep_reference, np.array(list(reference)),
                         majority)
    return "".join(consensus.tolist())


def write_consensus_fasta(sequences: dict, path: str) -> None:
    """
        Writes consensus sequences to a FASTA file.

        :param sequences: record id -> sequence
        :type sequences: dict
        :param path: target file
        :type path: str
    """
    records = [SeqRecord(Seq(sequence), id=name, description="consensus")
               for name, sequence in sequences.items()]
    SeqIO.write(records, path, "fasta")
    logging.info("\t Wrote {} consensus sequences to {}".format(len(records),
                                                                path))


def import_reference(filepath: str) -> tuple:
    """
        Reads the first record of a FASTA file.

        :return: - **name** (str) - record id
                 - **sequence** (str) - upper case sequence
        :raise: - **ValueError** - file without record
    """
    records = SeqIO.parse(filepath, "fasta")
    record = next(records, None)
    if record is None:
        raise ValueError("no sequence found in " + str(filepath))
    return record.id, str(record.seq).upper()


def import_consensus(filepath: str) -> list:
    """ sequences of a consensus FASTA file in file order """
    return [str(record.seq).upper()
            for record in SeqIO.parse(filepath, "fasta")]
