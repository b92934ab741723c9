# -*- coding: utf-8 -*-
"""
    Detection and separation of mixed infections in whole genome
    sequencing samples.
"""
__package__ = "program_files"
