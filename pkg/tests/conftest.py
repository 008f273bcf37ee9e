"""
Shared fixtures: micro ranked alphabets and GTRSs, and a seeded generator.
"""
import random

import pytest

from gtrwfo.gtrs import Gtrs, parse_gtrs
from gtrwfo.trees import RankedAlphabet, parse_alphabet


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running randomized suites")


@pytest.fixture
def binary() -> RankedAlphabet:
    """a/0 b/0 f/2"""
    return parse_alphabet("a/0 b/0 f/2")


@pytest.fixture
def r_loop() -> Gtrs:
    """A single self-loop rule a -s-> a."""
    return parse_gtrs("alphabet: a/0 dot/2\nactions: s\na -s-> a\n")


@pytest.fixture
def r_step() -> Gtrs:
    """A single rule a -s-> b."""
    return parse_gtrs("alphabet: a/0 b/0 dot/2\nactions: s\na -s-> b\n")


@pytest.fixture
def r_swap() -> Gtrs:
    """a -s-> b over a binary alphabet, for spheres with several redexes."""
    return parse_gtrs("alphabet: a/0 b/0 f/2\nactions: s\na -s-> b\n")


@pytest.fixture
def r_grow() -> Gtrs:
    """a -g-> f(a,a): spheres grow without bound."""
    return parse_gtrs("alphabet: a/0 f/2\nactions: g\na -g-> f(a,a)\n")


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)
