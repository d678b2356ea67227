import pytest

import acceptance_log
from mpnike import kgc, legacy, params
from mpnike.numt import Rng

MASTER_SEED = 20260814
FAST_1024_SEED = 9


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)


def _issue_many(pp, msk, n, seed, prefix="u"):
    store = kgc.new_keystore(pp)
    rng = Rng(seed)
    pairs = [kgc.keygen(pp, msk, store, f"{prefix}{i:02d}", rng) for i in range(n)]
    return store, pairs


@pytest.fixture(scope="session")
def toy16():
    return params.setup(params.security_level("toy", 16), Rng(MASTER_SEED))


@pytest.fixture(scope="session")
def toy16_users(toy16):
    pp, msk = toy16
    return _issue_many(pp, msk, 12, MASTER_SEED + 1)


@pytest.fixture(scope="session")
def toy64():
    return params.setup(params.security_level("toy", 64), Rng(MASTER_SEED))


@pytest.fixture(scope="session")
def toy64_users(toy64):
    pp, msk = toy64
    return _issue_many(pp, msk, 10, MASTER_SEED + 2)


@pytest.fixture(scope="session")
def forced713():
    return params.setup(
        params.security_level("toy", 16), Rng(MASTER_SEED), forced_primes=(3, 5, 11)
    )


@pytest.fixture(scope="session")
def big1024():
    return params.setup(params.security_level("80"), Rng(FAST_1024_SEED))


@pytest.fixture(scope="session")
def big1024_users(big1024):
    pp, msk = big1024
    return _issue_many(pp, msk, 64, MASTER_SEED + 3)


@pytest.fixture(scope="session")
def esk512():
    return legacy.esk_setup(512, Rng(MASTER_SEED))
