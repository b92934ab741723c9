# -*- coding: utf-8 -*-
"""
    Pileup of aligned reads.

    Counts the bases A, C, G and T observed at every reference position
    and converts them into per-site feature vectors holding the base
    percentages and the depth of coverage.
"""
from dataclasses import dataclass
from multiprocessing import Pool
import logging

import numpy as np

BASES = ("A", "C", "G", "T")
# lookup table ASCII code -> base index, 4 marks N and anything else
BASE_CODES = np.full(256, 4, dtype=np.uint8)
for index, base in enumerate(BASES):
    BASE_CODES[ord(base)] = index
    BASE_CODES[ord(base.lower())] = index


@dataclass(frozen=True)
class SiteFeature:
    """
        Base counts of one reference position.

        ``count_vector`` holds the counts in the order A, C, G, T.
    """
    position: int
    count_vector: tuple

    @property
    def depth(self) -> int:
        return sum(self.count_vector)

    @property
    def counts(self) -> dict:
        return dict(zip(BASES, self.count_vector))

    @property
    def percent(self) -> dict:
        depth = self.depth
        if depth == 0:
            return dict.fromkeys(BASES, 0.0)
        return {base: 100 * count / depth
                for base, count in zip(BASES, self.count_vector)}

    def feature_vector(self) -> tuple:
        """ (%A, %C, %G, %T, depth) """
        percent = self.percent
        return tuple(percent[base] for base in BASES) + (self.depth,)

    def sorted_percent(self) -> list:
        """ base percentages in descending order """
        return sorted(self.percent.values(), reverse=True)


def encode_bases(bases: str) -> np.ndarray:
    """ converts a base string into an array of base indices """
    return BASE_CODES[np.frombuffer(bases.encode("ascii"), dtype=np.uint8)]


def count_bases(reads: list, ref_length: int) -> np.ndarray:
    """
        Tallies the bases of the reads at every reference position by
        walking each read's CIGAR. Insertions and soft clips consume
        read bases only, deletions consume reference positions only,
        N bases are not counted.

        :param reads: AlignedRead objects
        :type reads: list
        :param ref_length: length of the reference
        :type ref_length: int

        :return: - **counts** (numpy.ndarray) - integer matrix of shape \
            (ref_length, 4)
        :raise: - **ValueError** - read reaching beyond the reference
    """
    positions = []
    codes = []
    for read in reads:
        if read.ref_start < 0 or read.ref_end > ref_length:
            raise ValueError("read {} exceeds the reference of length "
                             "{}".format(read.read_id, ref_length))
        read_codes = encode_bases(read.bases)
        for ref_pos, query_pos, length in read.aligned_blocks():
            positions.append(np.arange(ref_pos, ref_pos + length))
            codes.append(read_codes[query_pos:query_pos + length])
    if not positions:
        return np.zeros((ref_length, 4), dtype=np.int64)
    positions = np.concatenate(positions)
    codes = np.concatenate(codes).astype(np.int64)
    # drop N bases
    called = codes < 4
    flat = np.bincount(positions[called] * 4 + codes[called],
                       minlength=ref_length * 4)
    return flat.reshape(ref_length, 4).astype(np.int64)


def sites_from_counts(counts: np.ndarray) -> list:
    """ one SiteFeature for every row of the count matrix with depth > 0 """
    covered = np.flatnonzero(counts.sum(axis=1))
    return [SiteFeature(position=int(position),
                        count_vector=tuple(int(count)
                                           for count in counts[position]))
            for position in covered]


def build_feature_vectors(reads: list, ref_length: int,
                          num_threads: int = 1) -> list:
    """
        Builds the feature vectors of all covered reference positions.

        :param reads: AlignedRead objects
        :type reads: list
        :param ref_length: length of the reference
        :type ref_length: int
        :param num_threads: number of worker processes counting \
            disjoint chunks of reads
        :type num_threads: int

        :return: - **sites** (list) - SiteFeature objects in ascending \
            position order, positions with depth 0 are absent
    """
    if num_threads > 1 and len(reads) > num_threads:
        # split the reads into one chunk per worker, the partial
        # counts are summed afterwards
        bounds = np.linspace(0, len(reads), num_threads + 1).astype(int)
        chunks = [reads[bounds[i]:bounds[i + 1]] for i in range(num_threads)]
        with Pool(num_threads) as pool:
            partial_counts = pool.starmap(
                count_bases, [(chunk, ref_length) for chunk in chunks])
        counts = np.sum(partial_counts, axis=0)
    else:
        counts = count_bases(reads=reads, ref_length=ref_length)
    sites = sites_from_counts(counts)
    logging.info("\t Pileup of {} reads covers {} of {} positions".format(
        len(reads), len(sites), ref_length))
    return sites
