import functools
from itertools import combinations

import numpy as np
import pytest
import scipy.sparse as sp

from spinconc import preset
from spinconc.report import solve

SX = np.array([[0, 1], [1, 0]]) / 2
SY = np.array([[0, -1j], [1j, 0]]) / 2
SZ = np.array([[1, 0], [0, -1]]) / 2


def site_op(op, site, n):
    # basis index bit ``site`` set <=> site is down; kron order puts site n-1 first
    mats = [sp.identity(2, format="csr")] * n
    mats[n - 1 - site] = sp.csr_matrix(op)
    out = mats[0]
    for m in mats[1:]:
        out = sp.kron(out, m, format="csr")
    return out


def full_heisenberg(n, edges):
    """Dense 2^N Hamiltonian from Kronecker products of spin matrices."""
    h = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for a, b in edges:
        for op in (SX, SY, SZ):
            h = h + site_op(op, a, n) @ site_op(op, b, n)
    assert abs(h.imag).max() == 0 if h.nnz else True
    return h.real


def full_sector_matrix(n, m, edges):
    words = [w for w in range(2**n) if bin(w).count("1") == m]
    h = full_heisenberg(n, edges)
    return h[words][:, words].toarray()


@functools.lru_cache(maxsize=None)
def cached_solution(name):
    return solve(preset(name))


@pytest.fixture(scope="session")
def solution():
    return cached_solution


def all_pairs(n):
    return list(combinations(range(n), 2))


def random_connected_graph(rng, n, p):
    """Random spanning tree plus each remaining pair with probability ``p``."""
    order = rng.permutation(n)
    edges = {tuple(sorted((int(order[k]), int(order[rng.integers(k)])))) for k in range(1, n)}
    for a, b in combinations(range(n), 2):
        if (a, b) not in edges and rng.random() < p:
            edges.add((a, b))
    return sorted(edges)


# filled by the acceptance module, printed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
