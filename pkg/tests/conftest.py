import pytest

from cachedof.scheme_pg import PGParams, PGScheme
from cachedof.scheme_subset import SubsetParams, SubsetScheme


@pytest.fixture(scope="session")
def desk_subset_scheme():
    """2 transmitters, 4 receivers, 4 files; 12 rounds of 2."""
    return SubsetScheme.build(SubsetParams(K_T=2, K_R=4, N=4, t_T=1, t_R=1))


@pytest.fixture(scope="session")
def pg_small_scheme():
    """15 receivers, t_R = 1 edge; 7560 rounds of 4."""
    params = PGParams(q=2, k_t=2, l_t=1, m_t=1, k_r=4, l_r=1, m_r=0)
    return PGScheme.build(params, n_files=3)


@pytest.fixture(scope="session")
def pg_minimal_scheme():
    """The 31-receiver desk-scale instance; 1,499,904 rounds of 5."""
    params = PGParams(q=2, k_t=2, l_t=1, m_t=1, k_r=5, l_r=1, m_r=1)
    return PGScheme.build(params, n_files=31)
