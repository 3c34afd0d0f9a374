#!/usr/bin/env python3
"""
Setup configuration for the Metaphorical Map Generator package
"""

from pathlib import Path

from setuptools import setup, find_packages


def read_readme():
    """Read README file for long description"""
    readme_path = Path(__file__).parent / "README.md"
    if readme_path.exists():
        return readme_path.read_text(encoding="utf-8")
    return "Metaphorical Map Generator - area-proportional maps of weighted plane graphs"


def read_requirements():
    """Read requirements from requirements.txt, skipping comments"""
    req_path = Path(__file__).parent / "requirements.txt"
    if not req_path.exists():
        return []
    requirements = []
    for line in req_path.read_text(encoding="utf-8").splitlines():
        line = line.split('#', 1)[0].strip()
        if line:
            requirements.append(line)
    return requirements


setup(
    name="metaphorical-map-generator",
    version="1.0.0",
    author="Graph Drawing Lab",
    description="Area-proportional metaphorical maps of weighted plane graphs via a force-directed simulation",
    long_description=read_readme(),
    long_description_content_type="text/markdown",
    packages=find_packages(include=["metaphorical_maps*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Visualization",
    ],
    python_requires=">=3.9",
    install_requires=read_requirements(),
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "pytest-cov>=4.0.0",
            "hypothesis>=6.80.0",
            "black>=23.0.0",
            "flake8>=6.0.0",
            "mypy>=1.0.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "metamap=metaphorical_maps.cli:main",
        ],
    },
    zip_safe=False,
    keywords="graph drawing, contact representation, cartogram, force-directed",
)
