import pytest


@pytest.fixture
def make_read():
    """
        Factory of aligned reads. Without an explicit CIGAR the read is
        aligned base to base.
    """
    from program_files.preprocessing.import_alignment import AlignedRead

    def _make_read(read_id, ref_start, bases, cigar=None, mate_flag="first",
                   map_quality=60):
        return AlignedRead(read_id=read_id,
                           mate_flag=mate_flag,
                           ref_start=ref_start,
                           cigar=cigar or [("M", len(bases))],
                           bases=bases,
                           base_qualities=[30] * len(bases),
                           map_quality=map_quality,
                           mate_is_mapped=True)
    return _make_read


@pytest.fixture
def make_profile():
    """
        Factory of an unfiltered sample profile, every count vector
        (A, C, G, T) becomes one site at consecutive positions.
    """
    from program_files.preprocessing.filter_profile import SampleProfile
    from program_files.preprocessing.pileup import SiteFeature

    def _make_profile(count_vectors, noise_threshold=10.0):
        from program_files.preprocessing.filter_profile import FilterConfig
        sites = [SiteFeature(position=position,
                             count_vector=tuple(count_vector))
                 for position, count_vector in enumerate(count_vectors)]
        depths = [site.depth for site in sites]
        return SampleProfile(
            sites=sites,
            mean_depth=sum(depths) / len(depths) if depths else 0.0,
            filtered_sites=list(sites),
            regions=[(0, len(sites))],
            config=FilterConfig(noise_threshold=noise_threshold))
    return _make_profile


@pytest.fixture(scope="session")
def mixed_sample():
    """
        Two strain sample (70 % / 30 %) on a 20 kb reference with 40
        SNPs per strain at depth 100.
    """
    from program_files.simulation.simulate_sample import SyntheticSpec, \
        simulate_sample
    spec = SyntheticSpec(ref_length=20_000, n_strains=2, snps_per_strain=40,
                         proportions=[0.7, 0.3], depth=100, read_length=150,
                         error_rate=0.01, seed=3, reference_seed=11)
    reference, truth, reads = simulate_sample(spec)
    return {"spec": spec, "reference": reference, "truth": truth,
            "reads": reads}


@pytest.fixture(scope="session")
def pure_sample():
    """ single strain counterpart of mixed_sample """
    from program_files.simulation.simulate_sample import SyntheticSpec, \
        simulate_sample
    spec = SyntheticSpec(ref_length=20_000, n_strains=1, snps_per_strain=40,
                         proportions=[1.0], depth=100, read_length=150,
                         error_rate=0.01, seed=5, reference_seed=11)
    reference, truth, reads = simulate_sample(spec)
    return {"spec": spec, "reference": reference, "truth": truth,
            "reads": reads}


@pytest.fixture(scope="session")
def mixed_profile(mixed_sample):
    """ pileup of mixed_sample filtered with the default parameters """
    from program_files.preprocessing.filter_profile import FilterConfig, \
        filter_profile
    from program_files.preprocessing.import_regions import \
        whole_genome_region
    from program_files.preprocessing.pileup import build_feature_vectors
    ref_length = mixed_sample["spec"].ref_length
    sites = build_feature_vectors(mixed_sample["reads"], ref_length)
    return filter_profile(sites, whole_genome_region(ref_length),
                          FilterConfig())


@pytest.fixture(scope="session")
def pure_profile(pure_sample):
    from program_files.preprocessing.filter_profile import FilterConfig, \
        filter_profile
    from program_files.preprocessing.import_regions import \
        whole_genome_region
    from program_files.preprocessing.pileup import build_feature_vectors
    ref_length = pure_sample["spec"].ref_length
    sites = build_feature_vectors(pure_sample["reads"], ref_length)
    return filter_profile(sites, whole_genome_region(ref_length),
                          FilterConfig())
