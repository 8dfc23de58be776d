"""Pairwise concurrence: general and X-form Wootters, the correlator-only
rule for nondegenerate singlet states, energy-based nearest-neighbour
estimates, and closed forms for the maximal-spin (Dicke) states."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .cluster import ClusterGraph
from .hamiltonian import StateVector
from .observables import PairDensityMatrix, pair_elements
from .spinbasis import sector_basis

PSD_TOL = 1e-10

_SYSY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


@dataclass
class PairReport:
    i: int
    j: int
    gamma: float
    z: float
    c_wootters: float
    c_gamma: float | None  # None: state degenerate or not a singlet
    class_id: str = ""

    @property
    def c(self) -> float:
        return self.c_wootters


@dataclass(frozen=True)
class DickeParams:
    num_sites: int
    num_down: int

    def __post_init__(self):
        if self.num_sites < 2:
            raise ValueError("Dicke states need at least two sites")
        if not 0 <= self.num_down <= self.num_sites:
            raise ValueError(f"down-spin count must lie in [0, {self.num_sites}]")

    @property
    def spin(self) -> float:
        return self.num_sites / 2

    @property
    def sz(self) -> float:
        return self.num_sites / 2 - self.num_down


# ------------------------------------------------------------- Wootters


def _xform_sqrt_eigenvalues(r: PairDensityMatrix) -> list[float]:
    # R R~ splits into the (uu, dd) block and the (ud, du) block
    outer = math.sqrt(max(r.u * r.v, 0.0))
    inner = math.sqrt(max(r.w1 * r.w2, 0.0))
    return [outer, outer, inner + abs(r.z), abs(inner - abs(r.z))]


def _general_sqrt_eigenvalues(rho: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(rho)
    root = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
    # sqrt(R) R~ sqrt(R) = M M^dagger, so the square roots are singular values of M;
    # this avoids taking square roots of rounding-level eigenvalues
    return np.linalg.svd(root @ _SYSY @ root.conj(), compute_uv=False)


def wootters(rho) -> float:
    """Concurrence of a two-qubit density matrix.

    Accepts a ``PairDensityMatrix`` (closed-form eigenvalues) or any 4x4
    density matrix (general route through sqrt(R) R~ sqrt(R), via an SVD).
    """
    if isinstance(rho, PairDensityMatrix):
        if not rho.is_valid(PSD_TOL):
            raise ValueError(f"not a valid density matrix: {rho}")
        mus = sorted(_xform_sqrt_eigenvalues(rho), reverse=True)
    else:
        rho = np.asarray(rho)
        if rho.shape != (4, 4):
            raise ValueError("expected a 4x4 density matrix")
        if not np.allclose(rho, rho.conj().T, atol=PSD_TOL):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > PSD_TOL or np.linalg.eigvalsh(rho).min() < -PSD_TOL:
            raise ValueError("density matrix must have unit trace and be positive semidefinite")
        mus = sorted(_general_sqrt_eigenvalues(rho), reverse=True)
    return max(0.0, mus[0] - mus[1] - mus[2] - mus[3])


def xform_concurrence(u: float, v: float, z: float) -> float:
    if u < 0 or v < 0:
        raise ValueError("diagonal weights must be non-negative")
    return 2.0 * max(0.0, abs(z) - math.sqrt(u * v))


def gamma_concurrence(gamma: float) -> float:
    """Concurrence of a pair in a nondegenerate S=0 state from <S_i^z S_j^z> alone."""
    if abs(gamma) > 0.25 + 1e-12:
        raise ValueError(f"|gamma| cannot exceed 1/4 for spin-1/2, got {gamma}")
    if gamma >= 0:
        return 0.0
    return max(0.0, 6.0 * (abs(gamma) - 1.0 / 12.0))


# ------------------------------------------------------- energy estimates


def energy_estimate_c1(e_g_abs: float, nn_per_site_ratio: float) -> float:
    """Nearest-neighbour concurrence implied by |E_g/N| on an edge-transitive lattice."""
    if e_g_abs < 0:
        raise ValueError("pass the magnitude of the energy per site")
    if nn_per_site_ratio <= 0:
        raise ValueError("bond-to-site ratio must be positive")
    return max(0.0, 6.0 * (e_g_abs / (3.0 * nn_per_site_ratio) - 1.0 / 12.0))


# |e_g| and N_n/N for extended lattices; energies are Bethe-ansatz (chain) or
# variational upper-bound estimates
LATTICE_ENERGIES: dict[str, tuple[float, float]] = {
    "chain": (math.log(2) - 0.25, 1.0),
    "square": (0.66, 2.0),
    "triangular": (0.53, 3.0),
    "kagome": (5.0 / 12.0, 2.0),
}


def lattice_estimate(name: str) -> float:
    """Estimator for a named lattice; also ``hypercubic:<d>`` and ``complete:<N>``."""
    if name in LATTICE_ENERGIES:
        return energy_estimate_c1(*LATTICE_ENERGIES[name])
    kind, _, arg = name.partition(":")
    if kind == "hypercubic" and arg.isdigit():
        d = int(arg)
        return energy_estimate_c1(d / 4.0, float(d))
    if kind == "complete" and arg.isdigit():
        n = int(arg)
        return energy_estimate_c1(3.0 / 8.0, (n - 1) / 2.0)
    valid = ", ".join([*LATTICE_ENERGIES, "hypercubic:<d>", "complete:<N>"])
    raise ValueError(f"unknown lattice {name!r}; valid: {valid}")


# ----------------------------------------------------------------- Dicke


def dicke_concurrence(p: DickeParams) -> float:
    n, m = p.num_sites, p.num_down
    if m in (0, n):
        return 0.0
    prefactor = 2.0 * m * (n - m) / (n * (n - 1))
    return prefactor * (1.0 - math.sqrt((m - 1) * (n - 1 - m) / (m * (n - m))))


def dicke_rdm(p: DickeParams) -> PairDensityMatrix:
    """Closed-form pair RDM of the uniform superposition (identical for every pair)."""
    n, m = p.num_sites, p.num_down
    norm = n * (n - 1)
    u = m * (m - 1) / norm
    v = (n - m) * (n - m - 1) / norm
    z = m * (n - m) / norm
    return PairDensityMatrix(u=u, v=v, w1=z, w2=z, z=z)


def dicke_state(p: DickeParams) -> StateVector:
    if p.num_sites > 16:
        raise ValueError("explicit Dicke states are limited to 16 sites")
    basis = sector_basis(p.num_sites, p.num_down)
    return StateVector(basis, np.full(basis.dim, 1.0 / math.sqrt(basis.dim)))


# --------------------------------------------------------------- reports


def pair_report(state: StateVector, i: int, j: int, gamma_rule: bool) -> PairReport:
    r = pair_elements(state, state, i, j)
    return report_from_rdm(r, i, j, gamma_rule)


def report_from_rdm(r: PairDensityMatrix, i: int, j: int, gamma_rule: bool) -> PairReport:
    # <S_i^z S_j^z> = (u + v - w1 - w2) / 4
    g = 0.25 * (r.u + r.v - r.w1 - r.w2)
    return PairReport(
        i=i,
        j=j,
        gamma=g,
        z=r.z,
        c_wootters=wootters(r),
        c_gamma=gamma_concurrence(g) if gamma_rule else None,
    )


def average_concurrence(reports: Sequence[PairReport]) -> float:
    pairs = {(min(r.i, r.j), max(r.i, r.j)) for r in reports}
    n = int(round((1 + math.sqrt(1 + 8 * len(reports))) / 2))
    expected = set(combinations(range(n), 2))
    if len(pairs) != len(reports) or pairs != expected:
        raise ValueError("average concurrence needs exactly one report per unordered pair")
    return float(np.mean([r.c_wootters for r in reports]))


# --------------------------------------------------- degenerate doublets


@dataclass
class ExtremalPair:
    theta: float
    state: StateVector
    orthogonal: StateVector
    bond_sum: float


def _bond_objective(v0: StateVector, v1: StateVector, edges):
    # RDM(theta) = c^2 R00 + c s (R01 + R10) + s^2 R11
    terms = []
    for i, j in edges:
        r00 = pair_elements(v0, v0, i, j)
        r11 = pair_elements(v1, v1, i, j)
        r01 = pair_elements(v0, v1, i, j) + pair_elements(v1, v0, i, j)
        terms.append((r00, r01, r11))

    def f(theta: float) -> float:
        c, s = math.cos(theta), math.sin(theta)
        total = 0.0
        for r00, r01, r11 in terms:
            r = r00.scaled(c * c) + r01.scaled(c * s) + r11.scaled(s * s)
            total += 2.0 * max(0.0, abs(r.z) - math.sqrt(max(r.u * r.v, 0.0)))
        return total

    return f


def _golden_max(f, a: float, b: float, tol: float) -> float:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def extremal_degenerate(ground: Sequence[StateVector], graph: ClusterGraph, grid: int = 720) -> ExtremalPair:
    """Real rotation of a degenerate doublet maximizing the summed bond concurrence.

    Scans theta in [0, pi) on a uniform grid, keeps the first maximum, and
    refines it by golden-section search to 1e-6.
    """
    if len(ground) != 2:
        raise ValueError(f"extremal search needs a doublet, got {len(ground)} states")
    v0, v1 = ground
    f = _bond_objective(v0, v1, graph.edges)
    thetas = np.arange(grid) * (math.pi / grid)
    values = np.array([f(t) for t in thetas])
    k = int(np.argmax(values))  # first occurrence: smallest theta wins ties
    h = math.pi / grid
    theta = _golden_max(f, thetas[k] - h, thetas[k] + h, 1e-6)
    if f(theta) < values[k]:
        theta = float(thetas[k])
    theta = theta % math.pi
    c, s = math.cos(theta), math.sin(theta)
    state = c * v0 + s * v1
    orth = (-s) * v0 + c * v1
    return ExtremalPair(theta=theta, state=state, orthogonal=orth, bond_sum=f(theta))
