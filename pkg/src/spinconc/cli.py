"""Ground states and pair concurrence of spin-1/2 Heisenberg clusters.

    spinconc ground  --cluster chain:12
    spinconc pairs   --cluster square:4x4 --format csv --output sq.csv
    spinconc dicke   --n 12
    spinconc estimate [--lattice square | --energy 0.66 --ratio 2]
    spinconc verify  --cluster davidstar:12

Exit codes: 0 success, 1 failed verification, 2 invalid input,
3 solver did not converge, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from . import report as rp
from .cluster import ClusterError
from .concurrence import LATTICE_ENERGIES, energy_estimate_c1, lattice_estimate
from .eigen import DEFAULT_DEG_TOL, DEFAULT_K, DEFAULT_SEED, DEFAULT_TOL, ConvergenceError, UnresolvedGroundSpace

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3, 4


def _solver_args(p: argparse.ArgumentParser):
    p.add_argument("--cluster", required=True, help="preset id (chain:12, square:4x4, ...) or cluster JSON path")
    p.add_argument("--m", type=int, default=None, help="number of down spins (default N//2)")
    p.add_argument("--k", type=int, default=DEFAULT_K, help="eigenpairs to compute")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="residual tolerance")
    p.add_argument("--deg-tol", type=float, default=DEFAULT_DEG_TOL, help="relative degeneracy window")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=1)
    _output_args(p)


def _output_args(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=rp.FORMATS, default="json")
    p.add_argument("--output", default=None, help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinconc", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _solver_args(sub.add_parser("ground", help="ground-state energy, degeneracy and total spin"))
    _solver_args(sub.add_parser("pairs", help="full pair report with concurrences and classes"))
    _solver_args(sub.add_parser("verify", help="run the cross-formula and sum-rule checks"))
    d = sub.add_parser("dicke", help="concurrence of the maximal-spin states for m = 0..N")
    d.add_argument("--n", type=int, required=True)
    _output_args(d)
    e = sub.add_parser("estimate", help="nearest-neighbour concurrence from the energy per site")
    e.add_argument("--lattice", help=f"one of {', '.join(LATTICE_ENERGIES)}, hypercubic:<d>, complete:<N>")
    e.add_argument("--energy", type=float, help="|e_g|, energy per site magnitude")
    e.add_argument("--ratio", type=float, help="bonds per site N_n/N")
    _output_args(e)
    return parser


def _config(args) -> rp.RunConfig:
    return rp.RunConfig(
        cluster=args.cluster, sector_m=args.m, k=args.k, tol=args.tol, deg_tol=args.deg_tol,
        seed=args.seed, threads=args.threads, output=args.output, format=args.format,
    )


def _emit(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _estimate(args) -> dict:
    if args.energy is not None or args.ratio is not None:
        if args.energy is None or args.ratio is None:
            raise ValueError("--energy and --ratio must be given together")
        return {"custom": rp.fmt(energy_estimate_c1(args.energy, args.ratio))}
    names = [args.lattice] if args.lattice else [*LATTICE_ENERGIES, "hypercubic:8", "complete:8"]
    return {name: rp.fmt(lattice_estimate(name)) for name in names}


def _flat_csv(d: dict) -> str:
    return "key,value\n" + "".join(f"{k},{v!r}\n" for k, v in d.items())


def _run(args) -> int:
    cmd = args.command
    if cmd == "dicke":
        rows = rp.dicke_table(args.n)
        _emit(rp.render_dicke(rows, args.format), args.output)
        return EXIT_OK
    if cmd == "estimate":
        est = _estimate(args)
        _emit(rp.render_json(est) if args.format == "json" else _flat_csv(est), args.output)
        return EXIT_OK
    cfg = _config(args)
    if cmd == "ground":
        sol = rp._solve_cfg(cfg)
        d = rp.ground_summary(sol)
        text = rp.render_json(d) if cfg.format == "json" else _flat_csv(
            {"cluster": d["cluster"]["name"], **{f"energy.{k}": v for k, v in d["energy"].items() if k != "total_spin"},
             "energy.total_spin": d["energy"]["total_spin"][0]}
        )
        _emit(text, cfg.output)
        return EXIT_OK
    if cmd == "pairs":
        rep = rp.run_report(cfg)
        _emit(rp.render(rep.to_dict(), cfg.format), cfg.output)
        return EXIT_OK
    # verify
    checks = rp.verify(cfg)
    if cfg.format == "json":
        text = rp.render_json({"passed": all(c.passed for c in checks),
                               "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]})
    else:
        text = "".join(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {c.detail}\n" for c in checks)
    _emit(text, cfg.output)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ClusterError, UnresolvedGroundSpace, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
