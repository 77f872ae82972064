"""Shared fixtures: bundled presentations and seeded samplers."""

import random
from pathlib import Path

import pytest

from torsionkit.pipeline import PresentationSampler, import_presentation, parse_presentation

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def hopf():
    return import_presentation(DATA_DIR / "hopf.pres")


@pytest.fixture
def borromean():
    return import_presentation(DATA_DIR / "borromean.pres")


@pytest.fixture
def sampler():
    return PresentationSampler(random.Random(20240917))


@pytest.fixture
def even_r_presentation():
    """H = Z^2 + Z_2 with a square relator; H/2 is free of rank 3."""
    text = """
    name even-r
    generators 3
    rank 2
    relator x1 x2 X1 X2
    relator x3 x3
    expansion 1: pairs=[(x1, x2)] powers=[] exponent=0
    expansion 2: pairs=[] powers=[x3] exponent=2
    """
    return parse_presentation(text)
