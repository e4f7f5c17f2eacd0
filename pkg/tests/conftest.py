import numpy as np
import pytest

from groupoidalg import (
    FinitePrincipalBundle,
    Section,
    cyclic,
    gauge_groupoid,
    group_groupoid,
    lorentz_subgroupoid,
    pair_groupoid,
    prop1_equivalence,
    symmetric,
    translation_subgroupoid,
)


@pytest.fixture(scope="session")
def fix_pair():
    return pair_groupoid(2)


@pytest.fixture(scope="session")
def fix_z3():
    return group_groupoid(cyclic(3))


@pytest.fixture(scope="session")
def bundle_2_z2():
    return FinitePrincipalBundle(2, cyclic(2))


@pytest.fixture(scope="session")
def bundle_3_s3():
    return FinitePrincipalBundle(3, symmetric(3))


@pytest.fixture(scope="session")
def fix_gauge_2_z2(bundle_2_z2):
    return gauge_groupoid(bundle_2_z2)


@pytest.fixture(scope="session")
def fix_gauge_3_s3(bundle_3_s3):
    return gauge_groupoid(bundle_3_s3)


@pytest.fixture(scope="session")
def decomposition_2_z2(bundle_2_z2, fix_gauge_2_z2):
    """Identity-section decomposition of the Z2 gauge fixture."""
    g0 = lorentz_subgroupoid(fix_gauge_2_z2)
    g1 = translation_subgroupoid(fix_gauge_2_z2, Section.identity(bundle_2_z2))
    return prop1_equivalence(fix_gauge_2_z2, g0, g1)


@pytest.fixture(scope="session")
def decomposition_3_s3(bundle_3_s3, fix_gauge_3_s3):
    g0 = lorentz_subgroupoid(fix_gauge_3_s3)
    g1 = translation_subgroupoid(fix_gauge_3_s3, Section.identity(bundle_3_s3))
    return prop1_equivalence(fix_gauge_3_s3, g0, g1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
