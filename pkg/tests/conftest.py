import numpy as np
import pytest

from beamunfold.channel import NetworkConfig, derive_sample_seed, generate_scenario


def random_hermitian_psd(rng: np.random.Generator, n: int, rank: int | None = None):
    rank = rank or n
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    return g @ g.conj().T


def desk_config(L=3, K=3, Nt=8, Nr=2, d=2) -> NetworkConfig:
    return NetworkConfig.from_dbm(L=L, K=K, Nt=Nt, Nr=Nr, d=d)


def seeded_instances(config: NetworkConfig, count: int, base_seed: int = 11):
    return [generate_scenario(config, derive_sample_seed(base_seed, i))
            for i in range(count)]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0xC0FFEE)
