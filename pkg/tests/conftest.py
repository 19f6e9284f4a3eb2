import numpy as np
import pytest


def random_ket(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng, dim, rank=None):
    rank = dim if rank is None else rank
    x = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


def low_photon_ket(rng, n_max, n_top):
    """Random atom (x) field ket supported on n <= n_top."""
    d = n_max + 1
    psi = np.zeros(2 * d, dtype=complex)
    idx = np.r_[0:n_top + 1, d:d + n_top + 1]
    psi[idx] = random_ket(rng, idx.size)
    return psi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def verdict(request):
    """Record one acceptance line: ``verdict(number, ok, detail)``."""
    lines = request.config.stash[ACCEPTANCE]

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
