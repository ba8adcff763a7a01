import pytest
from hypothesis import HealthCheck, settings, strategies as st

from heinzlab.linalg import make_rng, random_complex, random_pd

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
orders = st.integers(min_value=1, max_value=6)


def triple(n, seed, cond_cap=1e3):
    rng = make_rng(seed)
    A = random_pd(n, int(rng.integers(2**62)), cond_cap)
    B = random_pd(n, int(rng.integers(2**62)), cond_cap)
    return A, B, random_complex((n, n), rng)


def random_hermitian(n, seed):
    G = random_complex((n, n), make_rng(seed))
    return 0.5 * (G + G.conj().T)


@pytest.fixture
def rng():
    return make_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
