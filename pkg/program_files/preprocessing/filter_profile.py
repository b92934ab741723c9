# -*- coding: utf-8 -*-
"""
    Selection of the sites entering the statistical analysis.

    Restricts the pileup to the analysed regions, removes sites with a
    low depth of coverage and sites showing a noisy second allele.
"""
from bisect import bisect_right
from dataclasses import dataclass, field
import logging

import numpy as np
import pandas

from program_files.preprocessing.pileup import BASES


@dataclass(frozen=True)
class FilterConfig:
    """
        ``kappa`` is the fraction of the mean depth a site needs to be
        kept, second alleles below ``noise_threshold`` percent mark a
        site as noisy.
    """
    kappa: float = 0.70
    noise_threshold: float = 10.0
    min_map_quality: int = 1
    depth_filter: bool = True

    def __post_init__(self):
        if not 0 < self.kappa <= 1:
            raise ValueError("kappa has to be within (0, 1]")
        if not 0 <= self.noise_threshold < 50:
            raise ValueError("noise_threshold has to be within [0, 50)")
        if self.min_map_quality < 0:
            raise ValueError("min_map_quality has to be non-negative")


@dataclass
class SampleProfile:
    """
        Pileup of one sample together with the sites kept by the
        filters. ``sites`` holds every covered position, ``regions``
        the analysed half-open intervals.
    """
    sites: list
    mean_depth: float
    filtered_sites: list
    regions: list
    config: FilterConfig = field(default_factory=FilterConfig)

    def count_matrix(self) -> np.ndarray:
        """ (n_sites, 4) integer matrix of the filtered sites' counts """
        if not self.filtered_sites:
            return np.zeros((0, 4), dtype=np.int64)
        return np.array([site.count_vector for site in self.filtered_sites],
                        dtype=np.int64)


def in_regions(position: int, regions: list, starts: list = None) -> bool:
    """
        Checks whether a position lies inside one of the sorted,
        non-overlapping half-open regions.
    """
    if starts is None:
        starts = [start for start, end in regions]
    index = bisect_right(starts, position) - 1
    return index >= 0 and position < regions[index][1]


def is_noisy(site, noise_threshold: float) -> bool:
    """
        A site is noisy if its second most frequent base is present,
        but below the noise threshold.
    """
    second = site.sorted_percent()[1]
    return 0 < second < noise_threshold


def filter_profile(sites, regions: list, config: FilterConfig
                   ) -> SampleProfile:
    """
        Applies the region, depth and noise filters.

        The mean depth is computed over the sites inside the regions
        before the depth filter is applied. A SampleProfile may be
        passed instead of a site list, it is filtered again starting
        from its unfiltered sites.

        :param sites: SiteFeature objects or a SampleProfile
        :type sites: list
        :param regions: sorted, non-overlapping half-open intervals
        :type regions: list
        :param config: filter parameters
        :type config: FilterConfig

        :return: - **profile** (SampleProfile) - filtered sample
        :raise: - **ValueError** - empty region list
    """
    if isinstance(sites, SampleProfile):
        sites = sites.sites
    if not regions:
        raise ValueError("at least one region is required, use the "
                         "whole genome interval to analyse everything")
    starts = [start for start, end in regions]
    region_sites = [site for site in sites
                    if in_regions(site.position, regions, starts)]
    if region_sites:
        mean_depth = float(np.mean([site.depth for site in region_sites]))
    else:
        mean_depth = 0.0
    min_depth = config.kappa * mean_depth if config.depth_filter else 0
    filtered_sites = []
    low_depth = 0
    noisy = 0
    for site in region_sites:
        if site.depth < min_depth:
            low_depth += 1
        elif is_noisy(site, config.noise_threshold):
            noisy += 1
        else:
            filtered_sites.append(site)
    logging.info("\t Mean depth of coverage: {:.2f}".format(mean_depth))
    logging.info("\t {} of {} sites kept ({} below depth {:.2f}, {} noisy, "
                 "{} outside regions)".format(
                     len(filtered_sites), len(sites), low_depth, min_depth,
                     noisy, len(sites) - len(region_sites)))
    return SampleProfile(sites=list(sites),
                         mean_depth=mean_depth,
                         filtered_sites=filtered_sites,
                         regions=list(regions),
                         config=config)


def variable_sites(profile: SampleProfile, config: FilterConfig = None
                   ) -> list:
    """
        Returns the filtered sites carrying a second allele at or above
        the noise threshold.

        :param profile: filtered sample
        :type profile: SampleProfile
        :param config: filter parameters, defaults to the profile's
        :type config: FilterConfig

        :return: - **sites** (list) - variable SiteFeature objects
    """
    config = config or profile.config
    return [site for site in profile.filtered_sites
            if site.sorted_percent()[1] > 0
            and site.sorted_percent()[1] >= config.noise_threshold]


def site_table(profile: SampleProfile) -> pandas.DataFrame:
    """
        Filtered sites with the columns position, A, C, G, T
        (percentages) and depth.
    """
    rows = [site.feature_vector() for site in profile.filtered_sites]
    table = pandas.DataFrame(rows, columns=list(BASES) + ["depth"])
    table.insert(0, "position",
                 [site.position for site in profile.filtered_sites])
    table["depth"] = table["depth"].astype(int)
    return table


def write_site_table(profile: SampleProfile, path: str) -> None:
    """ writes the site_table as tab separated file """
    site_table(profile).to_csv(path, sep="\t", index=False)
