"""Shared fixtures: the radial reference setup used across the suite.

Everything heavy (field solves) is session-scoped; tests must treat the
fields as read-only.
"""

import numpy as np
import pytest

from gnplab.geometry import disc_body, constant_profile, make_domain
from gnplab.oracle import RadialOracle
from gnplab.solver import SourceSpec, solve_poisson, solve_biharmonic_system

A_CORE = 0.5
R_OUT = 1.0


@pytest.fixture(scope="session")
def oracle_ref():
    return RadialOracle(A_CORE, R_OUT, 1.0)


@pytest.fixture(scope="session")
def radial_domain():
    body = disc_body((0.0, 0.0), A_CORE, 512)
    return make_domain(body, constant_profile(body, R_OUT - A_CORE))


@pytest.fixture(scope="session")
def unit_source():
    return SourceSpec(kind="constant_on_C", f0=1.0)


@pytest.fixture(scope="session")
def fld128(radial_domain, unit_source):
    return solve_poisson(radial_domain, unit_source, 1.0 / 128)


@pytest.fixture(scope="session")
def pair128(radial_domain, unit_source):
    return solve_biharmonic_system(radial_domain, unit_source, 1.0 / 128)


@pytest.fixture(scope="session")
def fld64(radial_domain, unit_source):
    return solve_poisson(radial_domain, unit_source, 1.0 / 64)


def radii_of(points):
    return np.linalg.norm(np.atleast_2d(points), axis=1)
