#!/usr/bin/env python
# -*- encoding: utf-8 -*-
import setuptools

__version__ = "1.0.0"
with open("README.md", encoding="utf-8") as f:
    long_description = f.read()

with open("requirements.txt") as f:
    install_requires = [line.strip() for line in f.read().splitlines()
                        if line.strip() and line.strip() not in
                        ("pytest", "hypothesis")]


setuptools.setup(
    name="MISS",
    version=__version__,
    license="GPL-3.0-only",
    description="Detection and separation of mixed bacterial infections "
                "from whole genome sequencing reads",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    package_data={"program_files": ["run_settings.json"]},
    install_requires=install_requires,
    python_requires=">=3.9",
    classifiers=[
        # complete classifier list:
        # http://pypi.python.org/pypi?%3Aaction=list_classifiers
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering :: Bio-Informatics",
    ],
    entry_points={
        "console_scripts": ["miss = program_files.start_script:main"]},
    extras_require={"dev": ["pytest", "hypothesis", "sphinx",
                            "sphinx_rtd_theme"]},
)
