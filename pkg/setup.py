"""
Setup script for the dflregret package.
"""

from setuptools import setup, find_packages

setup(
    name="dflregret",
    version="0.1.0",
    description="Pessimistic-regret training of linear cost predictors for linear programs",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=2.0.0",
        "pydantic>=2.0.0",
        "pyyaml>=6.0",
        "python-dotenv>=1.0.0",
        "structlog>=24.0.0",
        "tqdm>=4.60.0",
        "typer>=0.9.0",
        "rich>=13.0.0",
    ],
    python_requires=">=3.10",
    entry_points={
        "console_scripts": [
            "dflregret=cli.main:app",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
