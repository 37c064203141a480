# -*- coding: utf-8 -*-
""" Setup for installation."""
from __future__ import absolute_import, division, print_function

import re

import setuptools

# obtain version from src/virodyn/_version.py
with open("src/virodyn/_version.py", encoding="UTF-8") as f:
    VERSION = re.search(
        r'^__version__\s*=\s*[\'"]([^\'"]*)[\'"]',
        f.read(),
        re.MULTILINE,
    ).group(1)

NAME = "virodyn"

test_requires = ["pytest", "pytest-cov", "pre-commit"]

# released requires
minimal_requires = [
    "numpy",
    "scipy",
    "pydantic>=2",
    "loguru==0.6.0",
]

dev_requires = minimal_requires + test_requires

with open("README.md", "r", encoding="UTF-8") as fh:
    long_description = fh.read()

setuptools.setup(
    name=NAME,
    version=VERSION,
    description="Equilibria, simulation and Lyapunov audits of a "
    "distributed-delay viral infection model with CTL response.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    keywords=["delay differential equations", "virus dynamics", "lyapunov"],
    package_dir={"": "src"},
    packages=setuptools.find_packages("src"),
    package_data={
        "virodyn": ["scenarios/*.json"],
    },
    install_requires=minimal_requires,
    extras_require={
        "dev": dev_requires,
    },
    license="Apache License 2.0",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.9",
    entry_points={
        "console_scripts": [
            "virodyn=virodyn.cli:entry",
        ],
    },
)
