"""Correlators, magnetization, total spin and two-site reduced density matrices.

Everything is a direct sum over the sector basis. Pair quantities go
through ``pair_elements``, which evaluates <a|O|b> for two amplitude
vectors so that expectation values in linear combinations of states can be
assembled without recomputing sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .hamiltonian import StateVector, apply_s2


@dataclass(frozen=True)
class PairDensityMatrix:
    """X-shaped two-site density matrix in the basis uu, ud, du, dd.

    ``v`` weights both-up, ``u`` both-down, ``w1`` site i up / site j down,
    ``w2`` the reverse, and ``z`` couples ud and du.
    """

    u: float
    v: float
    w1: float
    w2: float
    z: float

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.v, 0.0, 0.0, 0.0],
                [0.0, self.w1, self.z, 0.0],
                [0.0, self.z, self.w2, 0.0],
                [0.0, 0.0, 0.0, self.u],
            ]
        )

    @property
    def trace(self) -> float:
        return self.u + self.v + self.w1 + self.w2

    def is_valid(self, tol: float = 1e-10) -> bool:
        diag_ok = min(self.u, self.v, self.w1, self.w2) >= -1e-12
        return diag_ok and abs(self.trace - 1.0) <= tol and self.w1 * self.w2 - self.z**2 >= -tol

    def scaled(self, c: float) -> PairDensityMatrix:
        return PairDensityMatrix(c * self.u, c * self.v, c * self.w1, c * self.w2, c * self.z)

    def __add__(self, other: PairDensityMatrix) -> PairDensityMatrix:
        return PairDensityMatrix(
            self.u + other.u, self.v + other.v, self.w1 + other.w1, self.w2 + other.w2, self.z + other.z
        )


def _check_pair(state: StateVector, i: int, j: int):
    n = state.num_sites
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"sites ({i}, {j}) out of range for {n} sites")
    if i == j:
        raise ValueError("pair observables need two distinct sites")


def pair_elements(a: StateVector, b: StateVector, i: int, j: int) -> PairDensityMatrix:
    """Bilinear RDM elements <a|O|b> (not normalized; ``a is b`` gives the RDM)."""
    _check_pair(a, i, j)
    basis = a.basis
    cfg = basis.configs
    di = (cfg >> i) & 1
    dj = (cfg >> j) & 1
    prod = a.amps * b.amps
    u = float(prod[(di & dj) == 1].sum())
    v = float(prod[(di | dj) == 0].sum())
    w1 = float(prod[(di == 0) & (dj == 1)].sum())
    w2 = float(prod[(di == 1) & (dj == 0)].sum())
    # S_j^+ S_i^- takes (i up, j down) to (i down, j up)
    src = np.flatnonzero((di == 0) & (dj == 1))
    dst = basis.indices(cfg[src] ^ ((1 << i) | (1 << j)))
    z = float(a.amps[dst] @ b.amps[src])
    return PairDensityMatrix(u, v, w1, w2, z)


def gamma(state: StateVector, i: int, j: int) -> float:
    """Diagonal correlator <S_i^z S_j^z>."""
    _check_pair(state, i, j)
    b = state.basis
    return float(np.sum(state.amps**2 * b.spins(i) * b.spins(j)))


def offdiag(state: StateVector, i: int, j: int) -> float:
    """Off-diagonal correlator <S_j^+ S_i^->."""
    return pair_elements(state, state, i, j).z


def local_sz(state: StateVector, i: int) -> float:
    if not 0 <= i < state.num_sites:
        raise ValueError(f"site {i} out of range")
    return float(np.sum(state.amps**2 * state.basis.spins(i)))


class TotalSpin(NamedTuple):
    value: float
    s2: float
    variance: float
    eigenstate: bool


def total_spin(state: StateVector, threads: int = 1) -> TotalSpin:
    """S from <S^2> = S(S+1); ``eigenstate`` is False when <S^4> - <S^2>^2 > 1e-8."""
    w = apply_s2(state, threads)
    s2 = float(state.amps @ w.amps)
    s4 = float(w.amps @ w.amps)
    var = s4 - s2 * s2
    value = 0.5 * (np.sqrt(1.0 + 4.0 * max(s2, 0.0)) - 1.0)
    return TotalSpin(float(value), s2, var, var <= 1e-8)


def pair_rdm(state: StateVector, i: int, j: int) -> PairDensityMatrix:
    return pair_elements(state, state, i, j)


def mixed_pair_rdm(states: Sequence[StateVector], i: int, j: int) -> PairDensityMatrix:
    """RDM of the equal-weight mixture of orthonormal ``states``."""
    acc = pair_rdm(states[0], i, j)
    for s in states[1:]:
        acc = acc + pair_rdm(s, i, j)
    return acc.scaled(1.0 / len(states))


def partial_trace_rdm(state: StateVector, i: int, j: int) -> np.ndarray:
    """Literal 4x4 partial trace over every site except i and j.

    Embeds the state in the full 2^N space and contracts the tensor; kept
    as an independent check of the scalar route above.
    """
    _check_pair(state, i, j)
    n = state.num_sites
    full = np.zeros(2**n)
    full[state.basis.configs] = state.amps
    # axis k of the tensor is bit (n-1-k) of the word
    psi = full.reshape((2,) * n)
    ai, aj = n - 1 - i, n - 1 - j
    psi = np.moveaxis(psi, (ai, aj), (0, 1)).reshape(4, -1)
    return psi @ psi.T
