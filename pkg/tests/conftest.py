"""Shared fixtures: small codes and constellations reused across modules."""

from __future__ import annotations

import pytest

from dbicm.constellation import build_apsk32_dvbs2, build_gray_qam
from dbicm.ldpc import peg_construct


@pytest.fixture(scope="session")
def qpsk():
    return build_gray_qam(2)


@pytest.fixture(scope="session")
def qam16():
    return build_gray_qam(4)


@pytest.fixture(scope="session")
def qam64():
    return build_gray_qam(6)


@pytest.fixture(scope="session")
def apsk32():
    return build_apsk32_dvbs2("2/3")


@pytest.fixture(scope="session")
def code48():
    """(3,6)-regular PEG code, N=48: big enough to decode, fast to build."""
    return peg_construct(48, 24, 3, seed=1)


@pytest.fixture(scope="session")
def code96():
    return peg_construct(96, 48, 3, seed=1)
