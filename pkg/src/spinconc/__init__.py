"""Exact diagonalization of spin-1/2 Heisenberg clusters and pairwise concurrence."""

from .cluster import ClusterError, ClusterGraph, load_cluster, pair_classes, preset
from .concurrence import (
    DickeParams,
    PairReport,
    average_concurrence,
    dicke_concurrence,
    dicke_state,
    energy_estimate_c1,
    extremal_degenerate,
    gamma_concurrence,
    wootters,
    xform_concurrence,
)
from .eigen import ConvergenceError, EigenResult, dense_spectrum, ground_space, lowest_eigenpairs
from .hamiltonian import StateVector, apply_h, apply_s2
from .observables import PairDensityMatrix, gamma, local_sz, offdiag, pair_rdm, total_spin
from .report import RunConfig, build_report, run_report, solve
from .spinbasis import SectorBasis, sector_basis

__version__ = "0.1.0"

__all__ = [
    "ClusterError", "ClusterGraph", "load_cluster", "pair_classes", "preset",
    "DickeParams", "PairReport", "average_concurrence", "dicke_concurrence", "dicke_state",
    "energy_estimate_c1", "extremal_degenerate", "gamma_concurrence", "wootters", "xform_concurrence",
    "ConvergenceError", "EigenResult", "dense_spectrum", "ground_space", "lowest_eigenpairs",
    "StateVector", "apply_h", "apply_s2",
    "PairDensityMatrix", "gamma", "local_sz", "offdiag", "pair_rdm", "total_spin",
    "RunConfig", "build_report", "run_report", "solve",
    "SectorBasis", "sector_basis",
]
