"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE
"""
import os
import re
import sys

from setuptools import setup, find_packages


def getVersion():
    """
    Read the package version without importing the package
    """
    versionFile = os.path.join(os.path.dirname(os.path.abspath(__file__)), "c4", "infrasec", "_version.py")
    with open(versionFile) as f:
        return re.search(r"^__version__ = \"([^\"]+)\"", f.read(), re.MULTILINE).group(1)

needs_pytest = {"pytest", "test", "ptr", "coverage"}.intersection(sys.argv)
pytest_runner = ["pytest-runner"] if needs_pytest else []

setup(
    name = "c4-infrasec",
    version = getVersion(),
    packages = find_packages(exclude=["tests"]),
    install_requires = [
        "hjson",
        "numpy",
        "pandas>=1.5",
        "scipy>=1.6",
    ],
    setup_requires=[] + pytest_runner,
    tests_require=["pytest", "pytest-cov"],
    entry_points = {
        "console_scripts": [
            "c4-infrasec = c4.infrasec.cli:main",
        ],
    },
    author = "IBM",
    author_email = "",
    description = "Attack impact simulation and communication resource allocation games for interdependent gas-power-water infrastructure",
    license = "MIT",
    keywords = "python c4 infrastructure security descriptor system game theory",
    url = "",
)
