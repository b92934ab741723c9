# -*- coding: utf-8 -*-
"""
    Assignment of reads to the strains of a mixed sample.

    A read covering variable sites is assigned by the alleles it
    carries there. For two strains the closed form binomial and
    Gaussian votes are available, the maximum a posteriori rule over
    the fitted mixture components handles any number of strains.
    Reads without variable sites stay unassigned and belong to every
    strain.
"""
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
import logging

import numpy as np
import pandas
from scipy import stats
from scipy.special import logsumexp

from program_files.preprocessing.pileup import BASES

MAJOR = "major"
MINOR = "minor"
ASSIGNMENT_RULES = ("map", "binomial", "vote")
# log-posteriors closer than this are considered a tie
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class VariantObservation:
    position: int
    supporting_count: int
    depth: int

    @property
    def base_percent(self) -> float:
        return 100 * self.supporting_count / self.depth


@dataclass
class ReadVariantProfile:
    read_id: str
    sites: list
    mate_flag: str = "first"


@dataclass
class StrainAssignment:
    read_id: str
    strain: int
    posterior: list = None
    log_posterior: list = None
    mate_flag: str = "first"

    @property
    def is_assigned(self) -> bool:
        return self.strain is not None


@dataclass
class SiteIndex:
    """ variable sites sorted by position for fast overlap queries """
    sites: list
    positions: list = field(init=False)

    def __post_init__(self):
        self.sites = sorted(self.sites, key=lambda site: site.position)
        self.positions = [site.position for site in self.sites]


def index_variable_sites(sites: list) -> SiteIndex:
    return SiteIndex(sites=list(sites))


def read_variant_profile(read, variable_sites) -> ReadVariantProfile:
    """
        Collects the variable sites covered by an aligned base of the
        read together with the count of the read's base at the site.

        :param read: aligned read
        :type read: AlignedRead
        :param variable_sites: variable sites or a SiteIndex of them
        :type variable_sites: list

        :return: - **profile** (ReadVariantProfile) - None if the read \
            has map quality 0 or covers no variable site
    """
    if read.map_quality == 0:
        return None
    if not isinstance(variable_sites, SiteIndex):
        variable_sites = index_variable_sites(variable_sites)
    positions = variable_sites.positions
    observations = []
    for ref_pos, query_pos, length in read.aligned_blocks():
        index = bisect_left(positions, ref_pos)
        while index < len(positions) and positions[index] < ref_pos + length:
            site = variable_sites.sites[index]
            base = read.bases[query_pos + positions[index] - ref_pos]
            if base in BASES:
                count = site.counts[base]
                if count > 0:
                    observations.append(VariantObservation(
                        position=site.position,
                        supporting_count=count,
                        depth=site.depth))
            index += 1
    if not observations:
        return None
    return ReadVariantProfile(read_id=read.read_id,
                              sites=observations,
                              mate_flag=read.mate_flag)


def assign_binomial(profile: ReadVariantProfile) -> str:
    """
        Binomial vote: the read belongs to the major strain if
        sum(2 x - d) >= 0 over its variable sites, x being the count of
        the read's base and d the depth of the site.
    """
    score = sum(2 * site.supporting_count - site.depth
                for site in profile.sites)
    return MAJOR if score >= 0 else MINOR


def assign_gaussian_vote(profile: ReadVariantProfile) -> str:
    """
        Gaussian vote: the read belongs to the major strain if
        sum(2 x / d - 1) >= 0. The sum is evaluated exactly.
    """
    score = sum(Fraction(2 * site.supporting_count, site.depth) - 1
                for site in profile.sites)
    return MAJOR if score >= 0 else MINOR


def _log_site_densities(profile: ReadVariantProfile, model, means
                        ) -> np.ndarray:
    """ (n_sites, K) matrix of log f(p_i | mu_k, sigma_k) """
    if model.family == "binomial":
        counts = np.array([site.supporting_count for site in profile.sites])
        depths = np.array([site.depth for site in profile.sites])
        return stats.binom.logpmf(counts[:, None], depths[:, None],
                                  means[None, :] / 100)
    percent = np.array([site.base_percent for site in profile.sites])
    return stats.norm.logpdf(percent[:, None], loc=means[None, :],
                             scale=model.sigmas[None, :])


def assign_map(profile: ReadVariantProfile, model) -> StrainAssignment:
    """
        Maximum a posteriori assignment

        log p_k = log w_k + sum_i log f(p_i | mu_k, sigma_k)

        with the component means normalized to sum up to 100. Ties are
        broken towards the component with the larger mean.

        :param profile: variable sites of the read
        :type profile: ReadVariantProfile
        :param model: mixture model with one component per strain, \
            sorted by descending mean
        :type model: MixtureModel

        :return: - **assignment** (StrainAssignment) - strain index \
            with posterior probabilities
    """
    means = model.means
    means = 100 * means / means.sum()
    weights = model.weights
    with np.errstate(divide="ignore"):
        log_p = np.log(weights) + _log_site_densities(
            profile, model, means).sum(axis=0)
    if not np.any(np.isfinite(log_p)):
        strain = int(np.argmax(weights))
        logging.warning("\t all strain densities of read {} underflow, "
                        "assigned to strain {}".format(profile.read_id,
                                                       strain))
        return StrainAssignment(read_id=profile.read_id,
                                strain=strain,
                                posterior=(weights / weights.sum()).tolist(),
                                log_posterior=log_p.tolist(),
                                mate_flag=profile.mate_flag)
    best = np.flatnonzero(log_p >= log_p.max() - TIE_TOLERANCE)
    strain = int(best[np.argmax(means[best])])
    posterior = np.exp(log_p - logsumexp(log_p))
    return StrainAssignment(read_id=profile.read_id,
                            strain=strain,
                            posterior=(posterior / posterior.sum()).tolist(),
                            log_posterior=log_p.tolist(),
                            mate_flag=profile.mate_flag)


def assign_reads(reads: list, variable_sites: list, model=None,
                 rule: str = "map") -> list:
    """
        Assigns every read covering a variable site.

        :param reads: aligned reads
        :type reads: list
        :param variable_sites: variable SiteFeature objects
        :type variable_sites: list
        :param model: mixture model with one component per strain, \
            required for the "map" rule
        :type model: MixtureModel
        :param rule: "map", "binomial" or "vote"
        :type rule: str

        :return: - **assignments** (list) - StrainAssignment objects in \
            read order, unassigned reads are skipped
        :raise: - **ValueError** - unknown rule or missing model
    """
    if rule not in ASSIGNMENT_RULES:
        raise ValueError("unknown assignment rule " + str(rule))
    if rule == "map" and model is None:
        raise ValueError("the map rule requires a mixture model")
    if rule != "map" and model is not None and model.K > 2:
        raise ValueError("the {} rule separates two strains only".format(
            rule))
    index = index_variable_sites(variable_sites)
    vote = {"binomial": assign_binomial, "vote": assign_gaussian_vote}.get(
        rule)
    assignments = []
    for read in reads:
        profile = read_variant_profile(read, index)
        if profile is None:
            continue
        if rule == "map":
            assignments.append(assign_map(profile, model))
        else:
            assignments.append(StrainAssignment(
                read_id=read.read_id,
                strain=0 if vote(profile) == MAJOR else 1,
                mate_flag=read.mate_flag))
    logging.info("\t {} of {} reads assigned by the {} rule".format(
        len(assignments), len(reads), rule))
    return assignments


def partition_reads(reads: list, assignments: list, n_strains: int) -> list:
    """
        Splits the reads into one list per strain. Every strain
        receives its assigned reads and all unassigned reads, the input
        order is preserved.

        :param reads: aligned reads
        :type reads: list
        :param assignments: StrainAssignment objects
        :type assignments: list
        :param n_strains: number of strains
        :type n_strains: int

        :return: - **partition** (list) - n_strains lists of reads
        :raise: - **ValueError** - strain index out of range
    """
    labels = {}
    for assignment in assignments:
        if not assignment.is_assigned:
            continue
        if not 0 <= assignment.strain < n_strains:
            raise ValueError("read {} assigned to strain {} of {}".format(
                assignment.read_id, assignment.strain, n_strains))
        labels[(assignment.read_id, assignment.mate_flag)] = \
            assignment.strain
    partition = [[] for _ in range(n_strains)]
    for read in reads:
        strain = labels.get((read.read_id, read.mate_flag))
        if strain is None:
            for strain_reads in partition:
                strain_reads.append(read)
        else:
            partition[strain].append(read)
    return partition


def mate_consistency(assignments: list) -> float:
    """
        Fraction of read pairs with both mates assigned whose mates
        carry the same strain label, None without such pairs.
    """
    by_read = {}
    for assignment in assignments:
        if assignment.is_assigned:
            by_read.setdefault(assignment.read_id, []).append(
                assignment.strain)
    pairs = [labels for labels in by_read.values() if len(labels) == 2]
    if not pairs:
        return None
    return sum(labels[0] == labels[1] for labels in pairs) / len(pairs)


def write_assignment_table(assignments: list, path: str) -> None:
    """
        Writes the assignments as tab separated table with the columns
        read_id, mate, strain and one log-posterior column per strain.
    """
    table = pandas.DataFrame({
        "read_id": [assignment.read_id for assignment in assignments],
        "mate": [assignment.mate_flag for assignment in assignments],
        "strain": [assignment.strain for assignment in assignments]})
    n_columns = max((len(assignment.log_posterior)
                     for assignment in assignments
                     if assignment.log_posterior is not None), default=0)
    for k in range(n_columns):
        table["log_posterior_{}".format(k)] = [
            assignment.log_posterior[k]
            if assignment.log_posterior is not None else np.nan
            for assignment in assignments]
    table.to_csv(path, sep="\t", index=False)


def read_assignment_table(path: str) -> list:
    """ reads a table written by write_assignment_table """
    table = pandas.read_csv(path, sep="\t", dtype={"read_id": str})
    return [StrainAssignment(read_id=row.read_id,
                             strain=int(row.strain),
                             mate_flag=row.mate)
            for row in table.itertuples(index=False)]
