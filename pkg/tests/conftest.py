import numpy as np
import pytest

from braidcat import (
    build_core,
    builtin_group,
    enumerate_bicharacter_rmatrices,
    solve_delta_r,
)
from braidcat.fqg import BUILTIN_GROUPS

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)


@pytest.fixture(scope="session")
def groups():
    return {name: builtin_group(name) for name in BUILTIN_GROUPS}


@pytest.fixture(scope="session")
def rfamilies(groups):
    return {name: enumerate_bicharacter_rmatrices(G)
            for name, G in groups.items()}


@pytest.fixture(scope="session")
def all_pairs(groups, rfamilies):
    pairs = []
    for name in BUILTIN_GROUPS:
        for R in rfamilies[name]:
            pairs.append((groups[name], R))
    return pairs


@pytest.fixture(scope="session")
def z2(groups):
    return groups["Z2"]


@pytest.fixture(scope="session")
def z2_sign(rfamilies):
    return rfamilies["Z2"][1]


@pytest.fixture(scope="session")
def z2_sign_core(z2, z2_sign):
    return build_core(z2, z2_sign)


@pytest.fixture(scope="session")
def z2_trivial_core(z2, rfamilies):
    return build_core(z2, rfamilies["Z2"][0])


@pytest.fixture(scope="session")
def all_cores(all_pairs):
    """One braided core per builtin (group, R-matrix) pair; 14 in total."""
    return [(G, R, build_core(G, R, solve_delta_r(G, R)))
            for G, R in all_pairs]
