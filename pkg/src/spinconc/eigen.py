"""Lowest eigenpairs of the sector Hamiltonian.

Lanczos with full reorthogonalization. One Krylov space started from a
single vector holds only one direction per eigenvalue, so exactly
degenerate levels are found by restarting in the orthogonal complement of
the eigenvectors already locked; each pass locks the lowest Ritz pair of
the deflated operator. The locked set is then rediagonalized against H
(Rayleigh-Ritz) to split any numerical mixing inside degenerate levels.

``dense_spectrum`` assembles the sector matrix column by column and is the
oracle for small sectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .cluster import ClusterGraph
from .hamiltonian import StateVector, apply_edges, dense_matrix
from .spinbasis import SectorBasis

DEFAULT_TOL = 1e-10
DEFAULT_DEG_TOL = 1e-8
DEFAULT_K = 4
DEFAULT_SEED = 1
MAX_ITER = 2000
MAX_K = 8
DENSE_CAP = 4000


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residuals=()):
        super().__init__(message)
        self.residuals = list(residuals)


class UnresolvedGroundSpace(ValueError):
    """The degeneracy window reaches the last computed eigenvalue."""


@dataclass
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: list[StateVector]
    residual_norms: np.ndarray
    degeneracy: int
    complete: bool = False  # True when the whole sector spectrum is present
    iterations: list[int] = field(default_factory=list)
    history: list[np.ndarray] = field(default_factory=list)  # lowest Ritz value per step, per pass

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])


def _window(eigenvalues, deg_tol):
    e0 = eigenvalues[0]
    return int(np.sum(eigenvalues - e0 < deg_tol * max(1.0, abs(e0))))


def _lanczos_pass(matvec, dim, locked, rng, tol, max_iter):
    """Lowest eigenpair of H restricted to the complement of ``locked``."""
    avail = dim - locked.shape[1]
    nmax = min(max_iter, avail)

    def deflate(w):
        if locked.shape[1]:
            w -= locked @ (locked.T @ w)
        return w

    q = deflate(deflate(rng.uniform(-1.0, 1.0, dim)))
    q /= np.linalg.norm(q)
    Q = np.empty((nmax, dim))
    alphas, betas, history = [], [], []
    beta = 0.0
    best = None
    for j in range(nmax):
        Q[j] = q
        w = matvec(q)
        alpha = float(q @ w)
        w -= alpha * q
        if j:
            w -= beta * Q[j - 1]
        for _ in range(2):
            w -= Q[: j + 1].T @ (Q[: j + 1] @ w)
            deflate(w)
        alphas.append(alpha)
        beta = float(np.linalg.norm(w))
        theta, s = eigh_tridiagonal(np.array(alphas), np.array(betas), select="i", select_range=(0, 0))
        theta, s = float(theta[0]), s[:, 0]
        history.append(theta)
        exhausted = j + 1 == nmax or beta < 1e-12 * max(1.0, abs(theta))
        if beta * abs(s[-1]) <= 0.1 * tol or exhausted:
            v = Q[: j + 1].T @ s
            v /= np.linalg.norm(v)
            res = float(np.linalg.norm(matvec(v) - theta * v))
            best = (theta, v, res)
            if res <= tol:
                return theta, v, res, j + 1, np.array(history)
            if exhausted:
                break
        betas.append(beta)
        q = w / beta
    residuals = [best[2]] if best else [float("nan")]
    raise ConvergenceError(
        f"Lanczos did not converge to residual {tol:g} within {nmax} iterations (achieved {residuals[0]:.3e})",
        residuals,
    )


def lowest_eigenpairs(
    graph: ClusterGraph,
    sector: SectorBasis,
    k: int = DEFAULT_K,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    deg_tol: float = DEFAULT_DEG_TOL,
    max_iter: int = MAX_ITER,
    threads: int = 1,
) -> EigenResult:
    if graph.num_sites != sector.num_sites:
        raise ValueError(f"cluster has {graph.num_sites} sites but the sector has {sector.num_sites}")
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must be between 1 and {MAX_K}, got {k}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    dim = sector.dim
    k = min(k, dim)

    def matvec(x):
        return apply_edges(graph.edges, sector, x, threads)

    rng = np.random.default_rng(seed)
    locked = np.empty((dim, 0))
    iterations, history = [], []
    for _ in range(k):
        _, v, _, its, hist = _lanczos_pass(matvec, dim, locked, rng, tol, max_iter)
        locked = np.column_stack([locked, v])
        iterations.append(its)
        history.append(hist)

    # Rayleigh-Ritz on the locked block
    basis, _ = np.linalg.qr(locked)
    hb = matvec(basis)
    evals, rot = np.linalg.eigh(basis.T @ hb)
    vecs = basis @ rot
    residuals = np.linalg.norm(hb @ rot - vecs * evals, axis=0)
    if np.any(residuals > tol):
        raise ConvergenceError(
            f"residuals after subspace rediagonalization exceed {tol:g}: {residuals.max():.3e}", residuals
        )
    return EigenResult(
        eigenvalues=evals,
        eigenvectors=[StateVector(sector, vecs[:, c]) for c in range(k)],
        residual_norms=residuals,
        degeneracy=_window(evals, deg_tol),
        complete=k == dim,
        iterations=iterations,
        history=history,
    )


def dense_spectrum(
    graph: ClusterGraph, sector: SectorBasis, deg_tol: float = DEFAULT_DEG_TOL, threads: int = 1
) -> EigenResult:
    if sector.dim > DENSE_CAP:
        raise ValueError(f"sector dimension {sector.dim} exceeds the dense cap of {DENSE_CAP}")
    h = dense_matrix(graph, sector, threads)
    evals, vecs = np.linalg.eigh(h)
    residuals = np.linalg.norm(h @ vecs - vecs * evals, axis=0)
    return EigenResult(
        eigenvalues=evals,
        eigenvectors=[StateVector(sector, vecs[:, c]) for c in range(sector.dim)],
        residual_norms=residuals,
        degeneracy=_window(evals, deg_tol),
        complete=True,
    )


def ground_space(result: EigenResult, deg_tol: float = DEFAULT_DEG_TOL) -> list[StateVector]:
    """Orthonormal basis of the lowest (possibly degenerate) level."""
    count = _window(result.eigenvalues, deg_tol)
    if count == len(result.eigenvalues) and not result.complete:
        raise UnresolvedGroundSpace(
            f"all {count} computed eigenvalues lie inside the degeneracy window; raise k to resolve the ground space"
        )
    block = np.column_stack([v.amps for v in result.eigenvectors[:count]])
    q, r = np.linalg.qr(block)
    q = q * np.sign(np.diag(r))
    sector = result.eigenvectors[0].basis
    return [StateVector(sector, q[:, c]) for c in range(count)]
