def test_consensus_matches_reference(make_read):
    from program_files.processing.consensus import consensus_sequence

    reference = "ACGTACGTAC"
    reads = [make_read("r1", 0, "ACGTAC"), make_read("r2", 4, "ACGTAC")]

    assert consensus_sequence(reads, reference) == reference
    # positions without reads keep the reference base
    assert consensus_sequence([], reference) == reference


def test_consensus_carries_snp(make_read):
    from program_files.processing.consensus import consensus_sequence

    reads = [make_read("r{}".format(index), 0, "AAGTA") for index in range(3)]
    reads.append(make_read("r3", 0, "ACGTA"))

    assert consensus_sequence(reads, "ACGTACGT") == "AAGTACGT"


def test_consensus_ties(make_read):
    """
        A tie involving the reference base keeps the reference, other
        ties take the first base in the order A, C, G, T.
    """
    from program_files.processing.consensus import consensus_sequence

    reads = [make_read("r1", 0, "AG"), make_read("r2", 0, "TC")]

    assert consensus_sequence(reads, "TT") == "TC"
    assert consensus_sequence(reads, "GG") == "AG"
    assert consensus_sequence(reads, "NN") == "AC"


def test_consensus_fasta(tmp_path):
    from program_files.processing.consensus import import_consensus, \
        import_reference, write_consensus_fasta

    path = str(tmp_path / "consensus.fasta")
    write_consensus_fasta({"s_strain0": "ACGT", "s_strain1": "acga"}, path)

    assert import_consensus(path) == ["ACGT", "ACGA"]
    assert import_reference(path) == ("s_strain0", "ACGT")


def test_import_reference_without_record(tmp_path):
    import pytest
    from program_files.processing.consensus import import_reference

    path = tmp_path / "empty.fasta"
    path.write_text("")
    with pytest.raises(ValueError):
        import_reference(str(path))
