"""Matrix-free Heisenberg Hamiltonian and total-spin operator.

    H = sum_<ij> [ (S_i^+ S_j^- + S_i^- S_j^+) / 2 + S_i^z S_j^z ]

with J = +1 and S^z = +-1/2. Each output amplitude is gathered from its own
configuration and the configurations reached by one exchange across an
anti-aligned bond, so the basis range can be split into disjoint output
slices with no shared accumulation. The per-entry summation order is fixed
(edge order), hence results are bit-identical for any thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .cluster import ClusterGraph
from .spinbasis import SectorBasis


@dataclass(frozen=True, eq=False)
class StateVector:
    basis: SectorBasis
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=float)
        if amps.shape != (self.basis.dim,):
            raise ValueError(f"amplitude vector of shape {amps.shape} does not match sector dimension {self.basis.dim}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("state has non-finite amplitudes")
        object.__setattr__(self, "amps", amps)

    @property
    def num_sites(self) -> int:
        return self.basis.num_sites

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> StateVector:
        return StateVector(self.basis, self.amps / self.norm())

    def dot(self, other: StateVector) -> float:
        return float(self.amps @ other.amps)

    def __add__(self, other: StateVector) -> StateVector:
        return StateVector(self.basis, self.amps + other.amps)

    def __sub__(self, other: StateVector) -> StateVector:
        return StateVector(self.basis, self.amps - other.amps)

    def __mul__(self, scalar: float) -> StateVector:
        return StateVector(self.basis, self.amps * scalar)

    __rmul__ = __mul__


def _check(graph: ClusterGraph, basis: SectorBasis):
    if graph.num_sites != basis.num_sites:
        raise ValueError(f"cluster has {graph.num_sites} sites but the state lives on {basis.num_sites}")


def _apply_slice(edges, basis: SectorBasis, x: np.ndarray, lo: int, hi: int) -> np.ndarray:
    configs = basis.configs
    cfg = configs[lo:hi]
    xs = x[lo:hi]
    out = np.zeros_like(xs)
    for a, b in edges:
        anti = ((cfg >> a) ^ (cfg >> b)) & 1
        sign = 0.25 - 0.5 * anti
        out += sign[:, None] * xs if xs.ndim == 2 else sign * xs
        rows = np.flatnonzero(anti)
        partners = np.searchsorted(configs, cfg[rows] ^ ((1 << a) | (1 << b)))
        out[rows] += 0.5 * x[partners]
    return out


def apply_edges(edges, basis: SectorBasis, x: np.ndarray, threads: int = 1) -> np.ndarray:
    """Raw kernel on an amplitude array of shape (dim,) or (dim, ncols)."""
    x = np.asarray(x, dtype=float)
    dim = basis.dim
    if x.shape[0] != dim:
        raise ValueError(f"vector length {x.shape[0]} does not match sector dimension {dim}")
    if threads <= 1 or dim < 2 * threads:
        return _apply_slice(edges, basis, x, 0, dim)
    bounds = np.linspace(0, dim, threads + 1).astype(int)
    out = np.empty_like(x)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(lambda k: _apply_slice(edges, basis, x, bounds[k], bounds[k + 1]), range(threads))
        for k, part in enumerate(parts):
            out[bounds[k] : bounds[k + 1]] = part
    return out


def apply_h(graph: ClusterGraph, v: StateVector, threads: int = 1) -> StateVector:
    _check(graph, v.basis)
    return StateVector(v.basis, apply_edges(graph.edges, v.basis, v.amps, threads))


def apply_s2(v: StateVector, threads: int = 1) -> StateVector:
    """Total spin squared via S^2 = 2 H_complete + 3N/4."""
    n = v.num_sites
    all_pairs = tuple(combinations(range(n), 2))
    w = 2.0 * apply_edges(all_pairs, v.basis, v.amps, threads) + 0.75 * n * v.amps
    return StateVector(v.basis, w)


def dense_matrix(graph: ClusterGraph, basis: SectorBasis, threads: int = 1) -> np.ndarray:
    """Column-by-column assembly of H in the sector (oracle use only)."""
    _check(graph, basis)
    return apply_edges(graph.edges, basis, np.eye(basis.dim), threads)
