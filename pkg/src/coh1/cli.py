"""Command-line front end: ``coh1 <subcommand> ...``.

Exit codes: 0 success, 1 verification or convergence failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import acceptance
from .cheeger import cheeger_deform
from .foliation import (
    doubly_warped_interval,
    doubly_warped_minimal_time,
    doubly_warped_residual,
    torus_family,
    torus_partition_check,
    warped_leaf_residual,
)
from .geometry import CATALOG, PtFamily, make_catalog_family
from .jets import DomainError
from .krmaps import DegreeInput, NoConvergence, admissible_k, brouwer_degree, shoot_kr, verify_table
from .solve import Functional, OrbitSolution, find_roots
from .stability import NULLITY_ATOL, stability_report, warped_index_nullity

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FAMILY_PARAMS = ("n", "k", "p", "m")

SOLUTION_FIELDS = ("t_root", "bracket_lo", "bracket_hi", "residual", "trA_at_root",
                   "classification", "order", "x_value", "tangential")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# number formatting


def fmt17(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isfinite(x):
        return format(x, ".17g")
    return "NaN" if math.isnan(x) else ("Infinity" if x > 0 else "-Infinity")


def dumps17(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps17(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{dumps17(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    return fmt17(obj)


def fmt6(x) -> str:
    if isinstance(x, float):
        return format(x, ".6g")
    return str(x)


# ---------------------------------------------------------------------------
# reports


@dataclass
class SolveReport:
    geometry: str
    params: dict
    cheeger_s: float
    order_r: int
    roots: list[OrbitSolution] = field(default_factory=list)
    elapsed_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry,
            "params": dict(self.params),
            "cheeger_s": self.cheeger_s,
            "order_r": self.order_r,
            "roots": [r.to_dict() for r in self.roots],
            "elapsed_ms": self.elapsed_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolveReport":
        return cls(d["geometry"], dict(d["params"]), float(d["cheeger_s"]), int(d["order_r"]),
                   [OrbitSolution.from_dict(r) for r in d["roots"]], float(d["elapsed_ms"]))

    def csv_rows(self) -> list[list]:
        rows = []
        for r in self.roots:
            d = r.to_dict()
            d["bracket_lo"], d["bracket_hi"] = d.pop("bracket")
            rows.append([self.geometry, json.dumps(self.params, sort_keys=True), self.cheeger_s,
                         self.order_r] + [d[k] for k in SOLUTION_FIELDS])
        return rows


CSV_HEADER = ["geometry", "params", "cheeger_s", "order_r", *SOLUTION_FIELDS]


def _family_params(args) -> dict:
    return {k: getattr(args, k) for k in FAMILY_PARAMS if getattr(args, k, None) is not None}


def build_family(args) -> PtFamily:
    try:
        fam = make_catalog_family(args.geometry, **_family_params(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    s = getattr(args, "cheeger_s", 0.0) or 0.0
    return cheeger_deform(fam, s) if s else fam


def _functional(args, order: int) -> Functional:
    if getattr(args, "minimal", False):
        return Functional.minimal()
    if order < 2:
        raise UsageError("--order must be >= 2")
    return Functional.for_order(order)


def run_solve(args, order: int, s: float) -> SolveReport:
    if s < 0:
        raise UsageError("Cheeger parameter must be >= 0")
    fam = make_catalog_family(args.geometry, **_family_params(args))
    if s:
        fam = cheeger_deform(fam, s)
    t0 = time.perf_counter()
    roots = find_roots(fam, _functional(args, order), grid_points=args.grid, tol=args.tol,
                       class_tol=args.class_tol)
    elapsed = (time.perf_counter() - t0) * 1e3
    return SolveReport(args.geometry, _family_params(args), float(s), order,
                       sorted(roots, key=lambda r: r.t_root), elapsed)


def emit_reports(reports: list[SolveReport], fmt: str, out, single: bool) -> None:
    if fmt == "json":
        payload = reports[0].to_dict() if single else [r.to_dict() for r in reports]
        out.write(dumps17(payload) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for rep in reports:
            w.writerows([[fmt17(x) if isinstance(x, (float, int)) else x for x in row]
                         for row in rep.csv_rows()])
    else:
        for rep in reports:
            label = f"{rep.geometry} {rep.params} s={fmt6(rep.cheeger_s)} r={rep.order_r}"
            out.write(f"{label}: {len(rep.roots)} root(s)\n")
            if rep.roots:
                out.write(f"  {'t':>12} {'x':>12} {'residual':>12} {'trA':>12}  class\n")
            for r in rep.roots:
                x = "" if r.x_value is None else fmt6(r.x_value)
                tag = " (tangential)" if r.tangential else ""
                out.write(f"  {fmt6(r.t_root):>12} {x:>12} {fmt6(r.residual):>12} "
                          f"{fmt6(r.trA_at_root):>12}  {r.classification.value}{tag}\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_catalog(args, out) -> int:
    if args.geometry is None:
        for name, (_, params) in sorted(CATALOG.items()):
            out.write(f"{name}({', '.join(params)})\n")
        return EXIT_OK
    out.write(dumps17(build_family(args).to_dict()) + "\n")
    return EXIT_OK


def cmd_solve(args, out) -> int:
    try:
        rep = run_solve(args, args.order, args.cheeger_s)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    emit_reports([rep], args.format, out, single=True)
    return EXIT_OK


def parse_range(spec: str) -> list[float]:
    try:
        start, end, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise UsageError(f"expected START:END:STEP, got {spec!r}") from None
    if step <= 0 or end < start:
        raise UsageError(f"empty range {spec!r}")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def parse_orders(spec: str) -> list[int]:
    try:
        orders = [int(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {spec!r}") from None
    if not orders:
        raise UsageError("empty order list")
    return orders


def thread_cap() -> int:
    raw = os.environ.get("COH1_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"COH1_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("COH1_THREADS must be >= 1")
    return n


def cmd_sweep(args, out) -> int:
    if args.cheeger:
        jobs = [(args.order, s) for s in parse_range(args.cheeger)]
    else:
        jobs = [(r, args.cheeger_s) for r in parse_orders(args.orders)]
    for r, s in jobs:
        if s < 0:
            raise UsageError("Cheeger parameter must be >= 0")
        _functional(args, r)
    try:
        make_catalog_family(args.geometry, **_family_params(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with ThreadPoolExecutor(max_workers=min(thread_cap(), len(jobs))) as pool:
        reports = list(pool.map(lambda job: run_solve(args, *job), jobs))
    emit_reports(reports, args.format, out, single=False)
    return EXIT_OK


def cmd_stability(args, out) -> int:
    if args.warped_leaf is not None:
        if args.t is None or args.t <= 0:
            raise UsageError("--warped-leaf needs --t > 0")
        res = warped_index_nullity(args.warped_leaf, args.t, args.nullity_atol)
        out.write(dumps17({"n": args.warped_leaf, "t": args.t, "index": res.index,
                           "nullity": res.nullity, "k_max": res.k_max}) + "\n")
        return EXIT_OK
    fam = build_family(args)
    if args.t is not None:
        times = [args.t]
    else:
        times = [r.t_root for r in find_roots(fam) if r.classification.value != "Minimal"]
    try:
        reports = [stability_report(fam, t).to_dict() for t in times]
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    out.write(dumps17({"geometry": args.geometry, "params": _family_params(args),
                       "cheeger_s": args.cheeger_s, "orbits": reports}) + "\n")
    return EXIT_OK


def _write_csv(rows, header, path) -> None:
    fh = open(path, "w", newline="") if path and path != "-" else None
    try:
        w = csv.writer(fh or sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows([[fmt17(x) for x in row] for row in rows])
    finally:
        if fh:
            fh.close()


def cmd_krmap(args, out) -> int:
    if args.action == "degree":
        if args.j < 1:
            raise UsageError("--j must be >= 1")
        try:
            d = DegreeInput("odd" if args.j % 2 else "even", args.codim0, args.codim1, args.weyl_order)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        k = args.map_k if args.map_k is not None else admissible_k(args.j, args.weyl_order)
        out.write(dumps17({"k": k, "degree": brouwer_degree(d, k)}) + "\n")
        return EXIT_OK
    fam = build_family(args)
    if args.action == "shoot":
        lo, hi = _pair(args.slope_range)
        try:
            res = shoot_kr(fam, args.map_k, (lo, hi))
        except NoConvergence as exc:
            sys.stderr.write(f"shooting did not converge: {exc}\n")
            return EXIT_FAIL
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        _write_csv(res.rows(), ["t", "r", "rdot", "F"], args.out if args.out else None)
        sys.stderr.write(f"slope {fmt17(res.slope0)}, mismatch {res.mismatch:.3e}, "
                         f"{res.iterations} Newton steps\n")
        return EXIT_OK
    ts, rs = _read_table(args.table)
    try:
        rows = verify_table(fam, args.map_k, ts, rs, args.points)
    except (ValueError, DomainError) as exc:
        raise UsageError(str(exc)) from None
    _write_csv([(r["t"], r["F"], r["G"]) for r in rows], ["t", "F", "G"], args.out)
    return EXIT_OK


def _pair(spec: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in spec.split(","))
    except ValueError:
        raise UsageError(f"expected LO,HI, got {spec!r}") from None
    return lo, hi


def _read_table(path: str):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        ts = [float(r["t"]) for r in rows]
        rs = [float(r["r"]) for r in rows]
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot read table {path!r} (need columns t,r): {exc}") from None
    if len(ts) < 6:
        raise UsageError("table needs at least 6 samples for quintic interpolation")
    return ts, rs


def cmd_foliation(args, out) -> int:
    try:
        if args.kind == "warped":
            ts = np.linspace(0.0, args.t_max, args.points)
            res = warped_leaf_residual(args.r, args.c1, args.c2, ts)
            _write_csv(zip(ts, res), ["t", "residual"], args.out)
        elif args.kind == "doubly":
            lo, hi = doubly_warped_interval(args.n, args.m)
            ts = np.linspace(lo, hi, args.points + 2)[1:-1]
            res = doubly_warped_residual(args.n, args.m, ts)
            sys.stderr.write(f"minimal leaf at t* = {fmt17(doubly_warped_minimal_time(args.n, args.m))}\n")
            _write_csv(zip(ts, res), ["t", "residual"], args.out)
        else:
            fam = torus_family(args.a, args.d)
            out.write(dumps17({
                "coefficients": [fam.a, fam.b, fam.c, fam.d],
                "proper": fam.proper, "c0_periodic": fam.c0_periodic,
                "c1_periodic": fam.c1_periodic,
                "partition": torus_partition_check(args.a, args.samples),
            }) + "\n")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


def cmd_verify(args, out) -> int:
    failed = ran = 0
    for check, failures in acceptance.run_checks(args.filter):
        ran += 1
        status = "PASS" if not failures else "FAIL"
        out.write(f"[{status}] {check.number:2d}  {check.name}\n")
        for msg in failures:
            out.write(f"         {msg}\n")
        failed += bool(failures)
    if not ran:
        raise UsageError(f"no check matches {args.filter!r}")
    out.write(f"{ran - failed}/{ran} checks passed\n")
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_family_args(p, required=True):
    p.add_argument("--geometry", required=required, choices=sorted(CATALOG), help="catalog family")
    for name in FAMILY_PARAMS:
        p.add_argument(f"--{name}", type=int, help=f"family parameter {name}")
    p.add_argument("--cheeger-s", type=float, default=0.0, help="Cheeger deformation parameter (default 0)")


def _add_solver_args(p):
    p.add_argument("--order", type=int, default=2, help="polyharmonic order r (default 2)")
    p.add_argument("--minimal", action="store_true", help="solve trA = 0 instead")
    p.add_argument("--grid", type=int, default=4096, help="scan grid size (default 4096)")
    p.add_argument("--tol", type=float, default=1e-12, help="root tolerance (default 1e-12)")
    p.add_argument("--class-tol", type=float, default=1e-8, help="classification tolerance (default 1e-8)")
    p.add_argument("--format", choices=("json", "csv", "table"), default="table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coh1", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list families or describe one as JSON")
    _add_family_args(p, required=False)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("solve", help="find biharmonic / r-harmonic orbits")
    _add_family_args(p)
    _add_solver_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve over a range of Cheeger parameters or orders")
    _add_family_args(p)
    _add_solver_args(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--cheeger", metavar="START:END:STEP")
    g.add_argument("--orders", metavar="R1,R2,...")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stability", help="normal stability of orbits or warped leaves")
    _add_family_args(p, required=False)
    p.add_argument("--t", type=float, help="orbit time (default: every proper biharmonic root)")
    p.add_argument("--warped-leaf", type=int, metavar="N", help="index/nullity of S^N(sqrt t) in dt^2 + t g")
    p.add_argument("--nullity-atol", type=float, default=NULLITY_ATOL)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("krmap", help="equivariant (k,r)-maps")
    ksub = p.add_subparsers(dest="action", required=True)
    q = ksub.add_parser("shoot", help="solve the boundary value problem; CSV t,r,rdot,F")
    _add_family_args(q)
    q.add_argument("--map-k", type=int, default=1)
    q.add_argument("--slope-range", default="0.5,1.5", metavar="LO,HI")
    q.add_argument("--out", help="CSV path (default stdout)")
    q = ksub.add_parser("verify", help="tension and bitension of a tabulated r(t)")
    _add_family_args(q)
    q.add_argument("--map-k", type=int, default=1)
    q.add_argument("--table", required=True, help="CSV with columns t,r")
    q.add_argument("--points", type=int, default=50)
    q.add_argument("--out")
    q = ksub.add_parser("degree", help="Brouwer degree of the induced sphere map")
    q.add_argument("--j", type=int, required=True, help="k = j |W| / 2 + 1 unless --map-k is given")
    q.add_argument("--codim0", choices=("even", "odd"), required=True)
    q.add_argument("--codim1", choices=("even", "odd"), required=True)
    q.add_argument("--weyl-order", type=int, required=True)
    q.add_argument("--map-k", type=int)
    p.set_defaults(func=cmd_krmap)

    p = sub.add_parser("foliation", help="polyharmonic foliations")
    fsub = p.add_subparsers(dest="kind", required=True)
    q = fsub.add_parser("warped", help="residual grid of f = c1 (c2+t)^((r-1)/r)")
    q.add_argument("--r", type=int, required=True)
    q.add_argument("--c1", type=float, default=1.0)
    q.add_argument("--c2", type=float, default=1.0)
    q.add_argument("--t-max", type=float, default=10.0)
    q.add_argument("--points", type=int, default=50)
    q.add_argument("--out")
    q = fsub.add_parser("doubly", help="residual grid of the doubly warped foliation")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--points", type=int, default=50)
    q.add_argument("--out")
    q = fsub.add_parser("torus", help="cubic leaves on the flat torus")
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--d", type=float, default=0.0)
    q.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(func=cmd_foliation)

    p = sub.add_parser("verify", help="run the reproduction checks")
    p.add_argument("--filter", help="substring of a check name or tag, or a check number")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, DomainError) as exc:
        sys.stderr.write(f"coh1: error: {exc}\n")
        return EXIT_USAGE


def run_to_string(argv) -> tuple[int, str]:
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
