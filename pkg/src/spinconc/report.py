"""Cluster reports, verification checks and Dicke tables.

This is the layer the command line drives. Reports are plain dicts once
serialized; every float is rounded to 12 significant digits so that the
JSON and CSV renderings carry identical numbers.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import cluster as cl
from .cluster import ClusterGraph
from .concurrence import (
    DickeParams,
    PairReport,
    average_concurrence,
    dicke_concurrence,
    dicke_state,
    energy_estimate_c1,
    extremal_degenerate,
    gamma_concurrence,
    report_from_rdm,
    wootters,
)
from .eigen import (
    DENSE_CAP,
    DEFAULT_DEG_TOL,
    DEFAULT_K,
    DEFAULT_SEED,
    DEFAULT_TOL,
    EigenResult,
    UnresolvedGroundSpace,
    dense_spectrum,
    ground_space,
    lowest_eigenpairs,
)
from .hamiltonian import StateVector, apply_s2
from .observables import local_sz, mixed_pair_rdm, pair_rdm, partial_trace_rdm, total_spin
from .spinbasis import SectorBasis, sector_basis

SINGLET_TOL = 1e-8
FORMATS = ("json", "csv")


def fmt(x: float) -> float:
    return float(f"{x:.12g}")


@dataclass
class RunConfig:
    cluster: str
    sector_m: int | None = None
    k: int = DEFAULT_K
    tol: float = DEFAULT_TOL
    deg_tol: float = DEFAULT_DEG_TOL
    seed: int = DEFAULT_SEED
    threads: int = 1
    output: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.k <= 0 or self.tol <= 0 or self.deg_tol <= 0 or self.threads <= 0:
            raise ValueError("k, tol, deg-tol and threads must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if self.sector_m is not None and self.sector_m < 0:
            raise ValueError("sector m must be non-negative")


@dataclass
class Solution:
    graph: ClusterGraph
    basis: SectorBasis
    result: EigenResult
    ground: list[StateVector]
    spins: list  # TotalSpin per ground vector
    used_dense: bool = False

    @property
    def energy(self) -> float:
        return self.result.ground_energy

    @property
    def degeneracy(self) -> int:
        return len(self.ground)

    @property
    def singlet(self) -> bool:
        return all(s.s2 < SINGLET_TOL for s in self.spins)


def solve(graph: ClusterGraph, m: int | None = None, k=DEFAULT_K, tol=DEFAULT_TOL, deg_tol=DEFAULT_DEG_TOL,
          seed=DEFAULT_SEED, threads=1) -> Solution:
    """Ground space of ``graph`` in the sector with ``m`` down spins (default N//2).

    When the requested ``k`` cannot resolve a degenerate level, small sectors
    fall back to the dense spectrum; larger ones raise.
    """
    n = graph.num_sites
    m = n // 2 if m is None else m
    basis = sector_basis(n, m)
    result = lowest_eigenpairs(graph, basis, k=min(k, basis.dim), tol=tol, seed=seed, deg_tol=deg_tol, threads=threads)
    used_dense = False
    try:
        ground = ground_space(result, deg_tol)
    except UnresolvedGroundSpace:
        if basis.dim > DENSE_CAP:
            raise
        result = dense_spectrum(graph, basis, deg_tol=deg_tol, threads=threads)
        ground = ground_space(result, deg_tol)
        used_dense = True
    spins = [total_spin(v, threads) for v in ground]
    return Solution(graph, basis, result, ground, spins, used_dense)


def state_reports(state: StateVector, gamma_rule: bool) -> list[PairReport]:
    n = state.num_sites
    return [report_from_rdm(pair_rdm(state, i, j), i, j, gamma_rule) for i, j in combinations(range(n), 2)]


def mixture_reports(states, gamma_rule: bool) -> list[PairReport]:
    n = states[0].num_sites
    return [report_from_rdm(mixed_pair_rdm(states, i, j), i, j, gamma_rule) for i, j in combinations(range(n), 2)]


@dataclass
class ClusterReport:
    graph: ClusterGraph
    num_down: int
    energy: float
    degeneracy: int
    total_spin: float
    pairs: list[PairReport]
    classes: dict
    avg_concurrence: float
    estimator_c1: float
    members: list[list[PairReport]] = field(default_factory=list)
    extremal: dict | None = None

    @property
    def energy_per_site(self) -> float:
        return self.energy / self.graph.num_sites

    def class_values(self) -> dict[str, float]:
        out = {}
        for r in self.pairs:
            out.setdefault(r.class_id, r.c_wootters)
        return out

    def to_dict(self) -> dict:
        d = {
            "cluster": {
                "name": self.graph.name,
                "num_sites": self.graph.num_sites,
                "num_bonds": self.graph.num_bonds,
                "num_down": self.num_down,
            },
            "energy": {
                "total": fmt(self.energy),
                "per_site": fmt(self.energy_per_site),
                "degeneracy": self.degeneracy,
                "total_spin": fmt(self.total_spin),
            },
            "pairs": _pairs_json(self.pairs),
            "classes": _classes_json(self.pairs),
            "avg_concurrence": fmt(self.avg_concurrence),
            "estimator_c1": fmt(self.estimator_c1),
        }
        if self.degeneracy > 1:
            d["pairs_basis"] = "ground-space average"
            d["ground_members"] = [
                {"pairs": _pairs_json(ps), "avg_concurrence": fmt(average_concurrence(ps))} for ps in self.members
            ]
        if self.extremal is not None:
            d["extremal"] = {
                "theta": fmt(self.extremal["theta"]),
                "bond_sum": fmt(self.extremal["bond_sum"]),
                "state": {"pairs": _pairs_json(self.extremal["state"])},
                "orthogonal": {"pairs": _pairs_json(self.extremal["orthogonal"])},
            }
        return d


def _pairs_json(reports):
    return [
        {
            "i": r.i,
            "j": r.j,
            "gamma": fmt(r.gamma),
            "z": fmt(r.z),
            "c": fmt(r.c_wootters),
            "c_gamma": None if r.c_gamma is None else fmt(r.c_gamma),
            "class": r.class_id,
        }
        for r in reports
    ]


def _classes_json(reports):
    groups: dict[str, list[PairReport]] = {}
    for r in reports:
        groups.setdefault(r.class_id, []).append(r)
    return [
        {
            "id": cid,
            "count": len(rs),
            "gamma": fmt(rs[0].gamma),
            "z": fmt(rs[0].z),
            "c": fmt(rs[0].c_wootters),
            "pairs": [[r.i, r.j] for r in rs],
        }
        for cid, rs in groups.items()
    ]


def build_report(sol: Solution) -> ClusterReport:
    g = sol.graph
    members: list[list[PairReport]] = []
    extremal = None
    if sol.degeneracy == 1:
        pairs = state_reports(sol.ground[0], gamma_rule=sol.singlet)
    else:
        # a multiplet-averaged singlet mixture is still rotation invariant
        pairs = mixture_reports(sol.ground, gamma_rule=sol.singlet)
        members = [state_reports(v, gamma_rule=False) for v in sol.ground]
        if sol.degeneracy == 2:
            ext = extremal_degenerate(sol.ground, g)
            extremal = {
                "theta": ext.theta,
                "bond_sum": ext.bond_sum,
                "state": state_reports(ext.state, gamma_rule=False),
                "orthogonal": state_reports(ext.orthogonal, gamma_rule=False),
            }
    classes = cl.pair_classes(g, pairs)
    for r in pairs:
        r.class_id = classes[(r.i, r.j)]
    mean_s2 = float(np.mean([s.s2 for s in sol.spins]))
    return ClusterReport(
        graph=g,
        num_down=sol.basis.num_down,
        energy=sol.energy,
        degeneracy=sol.degeneracy,
        total_spin=0.5 * (math.sqrt(1.0 + 4.0 * max(mean_s2, 0.0)) - 1.0),
        pairs=pairs,
        classes=classes,
        avg_concurrence=average_concurrence(pairs),
        estimator_c1=energy_estimate_c1(abs(sol.energy) / g.num_sites, g.num_bonds / g.num_sites),
        members=members,
        extremal=extremal,
    )


def _solve_cfg(cfg: RunConfig) -> Solution:
    graph = cl.resolve(cfg.cluster)
    return solve(graph, cfg.sector_m, cfg.k, cfg.tol, cfg.deg_tol, cfg.seed, cfg.threads)


def run_report(cfg: RunConfig) -> ClusterReport:
    return build_report(_solve_cfg(cfg))


def ground_summary(sol: Solution) -> dict:
    g = sol.graph
    return {
        "cluster": {"name": g.name, "num_sites": g.num_sites, "num_bonds": g.num_bonds, "num_down": sol.basis.num_down},
        "energy": {
            "total": fmt(sol.energy),
            "per_site": fmt(sol.energy / g.num_sites),
            "degeneracy": sol.degeneracy,
            "total_spin": [fmt(s.value) for s in sol.spins],
        },
        "eigenvalues": [fmt(e) for e in sol.result.eigenvalues[: max(DEFAULT_K, sol.degeneracy + 1)]],
        "sector_dim": sol.basis.dim,
        "solver": "dense" if sol.used_dense else "lanczos",
    }


# ------------------------------------------------------------- rendering


def render_json(d: dict) -> str:
    return json.dumps(d, indent=2) + "\n"


def render_csv(d: dict) -> str:
    """Summary block (``field,value``), a blank line, then one row per pair and pair set."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    w.writerow(["cluster", d["cluster"]["name"]])
    for key in ("total", "per_site", "degeneracy", "total_spin"):
        w.writerow([f"energy.{key}", _cell(d["energy"][key])])
    for key in ("avg_concurrence", "estimator_c1"):
        w.writerow([key, _cell(d[key])])
    if "extremal" in d:
        w.writerow(["extremal.theta", _cell(d["extremal"]["theta"])])
        w.writerow(["extremal.bond_sum", _cell(d["extremal"]["bond_sum"])])
    w.writerow([])
    w.writerow(["set", "i", "j", "gamma", "z", "c", "c_gamma", "class"])
    sets = [("ground", d["pairs"])]
    sets += [(f"member{k}", m["pairs"]) for k, m in enumerate(d.get("ground_members", []))]
    if "extremal" in d:
        sets += [("extremal", d["extremal"]["state"]["pairs"]), ("extremal_orthogonal", d["extremal"]["orthogonal"]["pairs"])]
    for name, rows in sets:
        for p in rows:
            w.writerow([name, p["i"], p["j"], _cell(p["gamma"]), _cell(p["z"]), _cell(p["c"]), _cell(p["c_gamma"]), p["class"]])
    return buf.getvalue()


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render(d: dict, format: str) -> str:
    return render_json(d) if format == "json" else render_csv(d)


# ---------------------------------------------------------------- verify


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)


def _close(checks, name, observed, expected, tol, where=""):
    ok = abs(observed - expected) <= tol
    detail = f"{where}observed {observed:.12g}, expected {expected:.12g} (tol {tol:g})"
    checks.append(Check(name, ok, detail))
    return ok


def _first_failures(name, items, tol):
    """Collapse a family of comparisons into one check that names the worst offender."""
    worst = max(items, key=lambda t: abs(t[1] - t[2]), default=None)
    if worst is None:
        return Check(name, True, "no items")
    where, obs, exp = worst
    ok = abs(obs - exp) <= tol
    return Check(name, ok, f"worst at {where}: observed {obs:.12g}, expected {exp:.12g} (tol {tol:g})")


def verify_solution(sol: Solution, tol: float = DEFAULT_TOL) -> list[Check]:
    checks: list[Check] = []
    g, basis, n = sol.graph, sol.basis, sol.graph.num_sites
    res = sol.result
    checks.append(Check("eigen.residuals", bool(np.all(res.residual_norms[: len(sol.ground)] <= tol)),
                        f"max residual {res.residual_norms[: len(sol.ground)].max():.3e}"))
    if basis.dim <= DENSE_CAP and not sol.used_dense:
        dense = dense_spectrum(g, basis).eigenvalues[: len(res.eigenvalues)]
        items = [(f"level {k}", res.eigenvalues[k], dense[k]) for k in range(len(dense))]
        checks.append(_first_failures("eigen.lanczos_vs_dense", items, 1e-10))

    # S^2 restricted to the ground space must have eigenvalues S(S+1)
    block = np.column_stack([v.amps for v in sol.ground])
    s2 = block.T @ np.column_stack([apply_s2(v).amps for v in sol.ground])
    s2_vals = np.linalg.eigvalsh(0.5 * (s2 + s2.T))
    spins = 0.5 * (np.sqrt(1.0 + 4.0 * np.clip(s2_vals, 0.0, None)) - 1.0)
    items = [(f"ground level {k}", 2 * spins[k], round(2 * spins[k])) for k in range(len(spins))]
    checks.append(_first_failures("spin.s2_quantized", items, 1e-8))

    sz = basis.sz
    pairs = list(combinations(range(n), 2))
    for idx, v in enumerate(sol.ground):
        tag = f"member{idx}." if sol.degeneracy > 1 else ""
        rdms = {p: pair_rdm(v, *p) for p in pairs}
        trace_items = [(p, r.trace, 1.0) for p, r in rdms.items()]
        checks.append(_first_failures(f"{tag}rdm.trace", trace_items, 1e-10))
        psd_bad = [p for p, r in rdms.items() if not r.is_valid(1e-10)]
        checks.append(Check(f"{tag}rdm.psd", not psd_bad, f"violations at {psd_bad[:5]}" if psd_bad else "all pairs"))
        lit_items = []
        woot_items = []
        for p, r in rdms.items():
            lit = partial_trace_rdm(v, *p)
            lit_items.append((p, float(np.abs(lit - r.matrix()).max()), 0.0))
            woot_items.append((p, wootters(r), wootters(lit)))
        checks.append(_first_failures(f"{tag}rdm.partial_trace_oracle", lit_items, 1e-10))
        checks.append(_first_failures(f"{tag}concurrence.xform_vs_general", woot_items, 1e-9))
        gsum = sum(0.25 * (r.u + r.v - r.w1 - r.w2) for r in rdms.values())
        _close(checks, f"{tag}sum_rule.gamma", gsum, (sz * sz - n / 4) / 2, 1e-10)
        if sol.degeneracy == 1 and sol.singlet:
            _rotation_checks(checks, tag, rdms, [local_sz(v, i) for i in range(n)])
    if sol.degeneracy > 1:
        checks.append(Check("gamma_rule", True, f"not applicable to individual members: ground level is {sol.degeneracy}-fold degenerate"))
        if sol.singlet:
            mixed = {p: mixed_pair_rdm(sol.ground, *p) for p in pairs}
            _rotation_checks(checks, "mixture.", mixed, None)
    elif not sol.singlet:
        checks.append(Check("gamma_rule", True, "not applicable: ground state is not a singlet"))
    return checks


def _rotation_checks(checks, tag, rdms, mags):
    z_items, uv_items, c_items = [], [], []
    for p, r in rdms.items():
        gam = 0.25 * (r.u + r.v - r.w1 - r.w2)
        z_items.append((p, r.z, 2 * gam))
        uv_items.append((p, r.u, 0.25 + gam))
        uv_items.append((p, r.v, 0.25 + gam))
        c_items.append((p, wootters(r), gamma_concurrence(gam)))
    checks.append(_first_failures(f"{tag}rotation.z_eq_2gamma", z_items, 1e-9))
    checks.append(_first_failures(f"{tag}rotation.u_eq_v_eq_quarter_plus_gamma", uv_items, 1e-9))
    checks.append(_first_failures(f"{tag}gamma_rule_vs_wootters", c_items, 1e-8))
    if mags is not None:
        checks.append(_first_failures(f"{tag}local_sz_zero", [(i, m, 0.0) for i, m in enumerate(mags)], 1e-10))


def verify(cfg: RunConfig) -> list[Check]:
    return verify_solution(_solve_cfg(cfg), cfg.tol)


# ----------------------------------------------------------------- Dicke


def dicke_table(n: int) -> list[dict]:
    if n < 2:
        raise ValueError("N must be at least 2")
    rows = []
    for m in range(n + 1):
        p = DickeParams(n, m)
        row = {"m": m, "sz": fmt(p.sz), "c_closed_form": fmt(dicke_concurrence(p))}
        if n <= 12:
            row["c_explicit"] = fmt(wootters(pair_rdm(dicke_state(p), 0, 1)))
        rows.append(row)
    return rows


def render_dicke(rows: list[dict], format: str) -> str:
    if format == "json":
        return render_json({"rows": rows})
    buf = io.StringIO()
    keys = list(rows[0])
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()
