#!/usr/bin/env python3
import setuptools

version = {}
with open("setzer_sha/version.py", "r") as f:
    exec(f.read(), version)

with open("README.md", "r") as f:
    long_description = f.read()

setuptools.setup(
    classifiers=[
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    description="Analytic Tate-Shafarevich orders of the curve pairs E1(u), E2(u) of conductor u^2 + 64.",
    entry_points={
        "console_scripts": [
            "setzersha=setzer_sha.cli.main:main",
        ]
    },
    extras_require={
        "dev": ["black", "isort", "pytest", "pytest-env", "snapshottest"]
    },
    long_description=long_description,
    long_description_content_type="text/markdown",
    install_requires=[
        "dataclasses_json",
        "jsonschema",
        "mpmath",
        "numpy",
        "uvloop",
    ],
    name="setzer-sha",
    packages=setuptools.find_packages(exclude=["test"]),
    package_data={
        "setzer_sha.formats": ["*.json"],
    },
    python_requires=">=3.9",
    version=version["__version__"],
)
