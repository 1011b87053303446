import functools

import pytest

from moff.designs import build_S, to_blocks
from moff.fusion import assemble
from moff.mub import construct_mubs


@functools.lru_cache(maxsize=None)
def mubs(field, m):
    return construct_mubs(field, m)


@functools.lru_cache(maxsize=None)
def blocks(r):
    return to_blocks(build_S(r))


@functools.lru_cache(maxsize=None)
def moff(field, m):
    r = m.bit_length() - 1
    return assemble(mubs(field, m), blocks(r))


@pytest.fixture(scope="session")
def moff_c4():
    return moff("complex", 4)


@pytest.fixture(scope="session")
def moff_r4():
    return moff("real", 4)
