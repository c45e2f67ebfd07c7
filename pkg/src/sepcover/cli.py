"""Command-line entry point: generate, solve, verify, bench and render.

Exit codes: 0 feasible / success, 1 error, 2 infeasible, 3 verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from sepcover import instance as inst_mod
from sepcover.bruteforce import MAX_ITEMS, brute_cover
from sepcover.cutting import build as build_cutting
from sepcover.dp_naive import solve_naive
from sepcover.geom import DEFAULT_EPS, ArcFamily, disk_inside
from sepcover.instance import (
    PROFILES,
    CoverageInstance,
    HalfplaneInstance,
    HittingInstance,
    InstanceFormatError,
    Solution,
)
from sepcover.interval_oracle import solve_interval
from sepcover.plotting import fit_slope, plot_bench
from sepcover.render import render_svg
from sepcover.solver import SOLVERS, SolverConfig, UnsupportedInstance, solve, solve_fast

log = logging.getLogger("sepcover")

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_MISMATCH = 0, 1, 2, 3
BENCH_VERSION = 1
BENCH_COLUMNS = [
    "n", "m", "r", "solver", "rep", "seconds", "ops",
    "point_scans", "list_appends", "drained", "heap_ops", "walk_steps", "delta",
]


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def workers() -> int:
    raw = os.environ.get("SEPCOVER_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"SEPCOVER_THREADS must be an integer, got {raw!r}") from None


def _fan_out(fn, tasks: list):
    """Map ``fn`` over ``tasks`` in order, across worker processes when allowed."""
    k = min(workers(), max(1, len(tasks)))
    if k == 1:
        return map(fn, tasks)
    pool = ProcessPoolExecutor(max_workers=k)
    return pool.map(fn, tasks)


def _write_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- generate ---------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.kind == "coverage":
        inst = inst_mod.generate(args.n, args.m, args.seed, args.profile, args.radius, args.infeasible)
    elif args.kind == "hitting":
        inst = inst_mod.generate_hitting(args.n, args.m, args.seed)
    else:
        inst = inst_mod.generate_halfplanes(args.n, args.m, args.seed)
    _write_text(inst_mod.dumps(inst) + "\n", args.out)
    return EXIT_OK


# -- solve ------------------------------------------------------------------


def _config(args) -> SolverConfig:
    return SolverConfig(
        r=args.r,
        rho=args.rho,
        seed=args.seed,
        eps=args.eps,
        exact=args.verify_exact,
        debug_invariants=args.debug_invariants,
    )


def cmd_solve(args) -> int:
    inst = inst_mod.read(args.input)
    if isinstance(inst, CoverageInstance):
        report = inst_mod.validate(inst, exact=args.verify_exact)
    elif isinstance(inst, HittingInstance):
        report = inst_mod.validate_hitting(inst)
    else:
        report = None
    if report is not None:
        for line in report.lines():
            print(line, file=sys.stderr)
        if not report.ok:
            raise CliError("instance failed validation")
    sol = solve(inst, args.solver, _config(args))
    _write_text(json.dumps(sol.to_dict(), default=_json_default) + "\n", args.output)
    bad = sol.stats.get("invariant_violations", 0)
    if bad:
        for v in sol.stats.get("violation_samples", []):
            print(v, file=sys.stderr)
        raise CliError(f"{bad} invariant violations")
    return EXIT_OK if sol.feasible else EXIT_INFEASIBLE


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


# -- verify -----------------------------------------------------------------


def parse_seeds(text: str) -> list[int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if b < a:
            raise CliError(f"empty seed range {text!r}")
        return list(range(a, b + 1))
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise CliError(f"bad seed list {text!r}; use A..B or a comma list") from None


def parse_size(text: str) -> tuple[int, int]:
    parts = [p for p in re.split(r"[x,()\s]+", text) if p]
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise CliError(f"bad size {text!r}; use NxM or N") from None
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2 or min(vals) < 1:
        raise CliError(f"bad size {text!r}; use NxM or N")
    return vals[0], vals[1]


def covers_all(inst: CoverageInstance, chosen, eps: float, exact: bool) -> bool:
    if not inst.n:
        return True
    if not chosen:
        return False
    pts = inst.point_array()
    cen = inst.center_array()[list(chosen)]
    cov = disk_inside(pts[None, :, 0], pts[None, :, 1], cen[:, None, 0], cen[:, None, 1], inst.radius, eps, exact)
    return bool(cov.reshape(len(cen), inst.n).any(axis=0).all())


def _weight_of(inst: CoverageInstance, chosen, exact: bool):
    if exact:
        return sum((Fraction(inst.weights[j]) for j in chosen), Fraction(0))
    return math.fsum(inst.weights[j] for j in chosen)


def _same(a, b, exact: bool) -> bool:
    if exact:
        return a == b
    a, b = float(a), float(b)
    if math.isinf(a) or math.isinf(b):
        return a == b
    return math.isclose(a, b, rel_tol=1e-6, abs_tol=1e-12)


def check_instance(inst: CoverageInstance, exact: bool = True, brute_cap: int = 12, seed: int = 0,
                   solver_fn=None) -> list[str]:
    """Problems found when running every solver on ``inst`` (empty when all agree)."""
    eps = DEFAULT_EPS
    fast = solver_fn or (lambda i: solve_fast(i, SolverConfig(exact=exact, seed=seed)))
    sols = {
        "naive": solve_naive(inst, eps, exact),
        "interval": solve_interval(inst, eps, exact),
        "fast": fast(inst),
    }
    problems = []
    ref = sols["naive"]
    for name, sol in sols.items():
        if len(sol.prefix_values) != len(ref.prefix_values) or not all(
            _same(a, b, exact) for a, b in zip(sol.prefix_values, ref.prefix_values)
        ):
            problems.append(f"{name} prefix differs from naive")
        if sol.feasible != ref.feasible:
            problems.append(f"{name} feasibility differs from naive")
        if sol.feasible:
            if len(set(sol.chosen)) != len(sol.chosen):
                problems.append(f"{name} repeats a disk")
            if not covers_all(inst, sol.chosen, eps, exact):
                problems.append(f"{name} subset leaves a point uncovered")
            if not _same(_weight_of(inst, sol.chosen, exact), sol.total_weight, exact):
                problems.append(f"{name} subset weight differs from its delta")
    if inst.m <= min(brute_cap, MAX_ITEMS):
        br = brute_cover(inst, eps, exact)
        if not _same(br.weight, ref.total_weight, exact):
            problems.append(f"brute force {br.weight} differs from naive {ref.total_weight}")
    return problems


def minimize(inst: CoverageInstance, failing, budget: int = 300) -> CoverageInstance:
    """Drop points and disks while ``failing(instance)`` stays true."""
    pts = list(range(inst.n))
    dks = list(range(inst.m))
    calls = 0
    for which in ("points", "disks"):
        chunk = max(1, len(pts if which == "points" else dks) // 2)
        while chunk >= 1 and calls < budget:
            items = pts if which == "points" else dks
            i, progress = 0, False
            while i < len(items) and calls < budget:
                keep = items[:i] + items[i + chunk:]
                trial = inst.subset(*((keep, dks) if which == "points" else (pts, keep)))
                calls += 1
                try:
                    bad = failing(trial)
                except Exception:  # the reduced instance may be degenerate; keep the larger one
                    bad = False
                if bad and len(keep) > 0:
                    items[:] = keep
                    progress = True
                else:
                    i += chunk
            if not progress:
                chunk //= 2
    return inst.subset(pts, dks)


def _verify_task(task):
    seed, (n, m), profile, exact, brute_cap = task
    inst = inst_mod.generate(n, m, seed, profile)
    return task, check_instance(inst, exact, brute_cap, seed)


def cmd_verify(args) -> int:
    seeds = parse_seeds(args.seeds)
    sizes = [parse_size(s) for s in args.sizes]
    for p in args.profiles:
        if p not in PROFILES:
            raise CliError(f"unknown profile {p!r}; choose from {', '.join(PROFILES)}")
    exact = not args.float
    tasks = [(s, size, p, exact, args.brute_cap) for size in sizes for p in args.profiles for s in seeds]
    t0 = time.perf_counter()
    checked = 0
    for task, problems in _fan_out(_verify_task, tasks):
        checked += 1
        if problems:
            seed, (n, m), profile, _, _ = task
            inst = inst_mod.generate(n, m, seed, profile)
            small = minimize(inst, lambda t: bool(check_instance(t, exact, args.brute_cap, seed)))
            path = Path(args.repro_dir) / f"sepcover-repro-{profile}-{n}x{m}-seed{seed}.json"
            path.parent.mkdir(parents=True, exist_ok=True)
            doc = {
                "instance": small.to_dict(),
                "origin": {"seed": seed, "n": n, "m": m, "profile": profile, "exact": exact},
                "problems": check_instance(small, exact, args.brute_cap, seed) or problems,
            }
            path.write_text(json.dumps(doc, indent=1))
            print(f"MISMATCH seed={seed} size={n}x{m} profile={profile}: {'; '.join(problems)}")
            print(f"reproducer: {path}")
            return EXIT_MISMATCH
    print(f"ok: {checked} instances agree ({time.perf_counter() - t0:.1f}s)")
    return EXIT_OK


# -- bench ------------------------------------------------------------------


def parse_sizes(tokens: list[str]) -> list[int]:
    """Sizes as integers, powers like 2^10, or a geometric range 2^10..2^15."""
    out: list[int] = []

    def num(t: str) -> int:
        m = re.fullmatch(r"(\d+)\^(\d+)", t)
        return int(m.group(1)) ** int(m.group(2)) if m else int(t)

    for tok in tokens:
        for part in tok.split(","):
            part = part.strip()
            if not part:
                continue
            try:
                m = re.fullmatch(r"(\d+)\^(\d+)\.\.(\d+)\^(\d+)", part)
                if m and m.group(1) == m.group(3):
                    base = int(m.group(1))
                    out += [base**e for e in range(int(m.group(2)), int(m.group(4)) + 1)]
                else:
                    out.append(num(part))
            except ValueError:
                raise CliError(f"bad size {part!r}") from None
    if not out or min(out) < 1:
        raise CliError("sizes must be positive")
    return out


def _bench_task(task):
    n, solver, rep, seed, r, profile = task
    inst = inst_mod.generate(n, n, seed + rep, profile)
    t0 = time.perf_counter()
    if solver == "naive":
        sol = solve_naive(inst)
    elif solver == "interval":
        sol = solve_interval(inst)
    else:
        sol = solve_fast(inst, SolverConfig(r=r, seed=seed + rep))
    secs = time.perf_counter() - t0
    c = sol.stats.get("counters", {})
    return {
        "n": n,
        "m": n,
        "r": sol.stats.get("r", ""),
        "solver": solver,
        "rep": rep,
        "seconds": round(secs, 6),
        "ops": sol.stats["ops"],
        "point_scans": c.get("point_scans", sol.stats["ops"] if solver == "naive" else ""),
        "list_appends": c.get("list_appends", ""),
        "drained": c.get("drained", ""),
        "heap_ops": c.get("heap_ops", ""),
        "walk_steps": c.get("walk_steps", ""),
        "delta": "inf" if math.isinf(float(sol.total_weight)) else float(sol.total_weight),
    }


def run_bench(sizes, solvers, reps: int = 1, seed: int = 0, r_values=None, profile: str = "uniform") -> list[dict]:
    tasks = []
    for n in sizes:
        for solver in solvers:
            rs = r_values if (solver == "fast" and r_values) else [None]
            for r in rs:
                if r is not None and r > n:
                    continue
                for rep in range(reps):
                    tasks.append((n, solver, rep, seed, r, profile))
    return list(_fan_out(_bench_task, tasks))


def bench_fits(records: list[dict]) -> dict:
    fits = {}
    for solver in sorted({r["solver"] for r in records}):
        rows = [r for r in records if r["solver"] == solver]
        ns = sorted({r["n"] for r in rows})
        ops = [float(np.median([r["ops"] for r in rows if r["n"] == n])) for n in ns]
        secs = [float(np.median([r["seconds"] for r in rows if r["n"] == n])) for n in ns]
        fits[solver] = {"ops_slope": fit_slope(ns, ops), "time_slope": fit_slope(ns, secs), "sizes": ns}
    return fits


def write_bench_csv(records: list[dict], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# sepcover bench v{BENCH_VERSION}: columns {','.join(BENCH_COLUMNS)}\n")
        w = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
        w.writeheader()
        w.writerows(records)


def cmd_bench(args) -> int:
    sizes = parse_sizes(args.sizes)
    for s in args.solvers:
        if s not in ("naive", "interval", "fast"):
            raise CliError(f"unknown solver {s!r}")
    r_values = [int(v) for v in args.r] if args.r else None
    records = run_bench(sizes, args.solvers, args.reps, args.seed, r_values, args.profile)
    write_bench_csv(records, args.out)
    fits = bench_fits(records)
    for solver, f in fits.items():
        print(f"fit {solver}: ops slope {f['ops_slope']:.3f}, time slope {f['time_slope']:.3f} over n = {f['sizes']}")
    Path(args.out).with_suffix(".fit.json").write_text(json.dumps(fits, indent=1))
    if not args.no_plot:
        plot_path = args.plot or str(Path(args.out).with_suffix(".png"))
        plot_bench(records, plot_path)
        print(f"plot: {plot_path}")
    print(f"csv: {args.out}")
    return EXIT_OK


# -- render -----------------------------------------------------------------


def cmd_render(args) -> int:
    inst = inst_mod.read(args.input)
    if isinstance(inst, HittingInstance):
        inst = inst_mod.hitting_to_coverage(inst)
    if isinstance(inst, HalfplaneInstance):
        raise CliError("render supports disk instances only")
    sol = None
    if args.solution:
        try:
            sol = Solution.from_dict(json.loads(Path(args.solution).read_text()))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise CliError(f"cannot read solution {args.solution}: {exc}") from None
        bad = [j for j in sol.chosen if not 0 <= j < inst.m]
        if bad:
            raise CliError(f"solution names disks {bad} outside 0..{inst.m - 1}")
    cut = None
    if args.show_cutting:
        if inst.n == 0:
            raise CliError("no points: there is nothing to cut")
        fam = ArcFamily(inst.point_array()[inst.sorted_order()], inst.radius)
        r = args.r or max(1, min(math.ceil(math.sqrt(max(inst.m, 1))), inst.n))
        cut = build_cutting(fam, r, 4, args.seed)
        print(json.dumps(cut.stats()))
    Path(args.out).write_text(render_svg(inst, sol, dual=args.dual, cutting=cut))
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sepcover", description="Weighted coverage of points by line-separated equal disks.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--n", type=int, required=True, help="number of points")
    g.add_argument("--m", type=int, required=True, help="number of disks (or halfplanes)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--profile", choices=PROFILES, default="uniform")
    g.add_argument("--radius", type=float, default=1.0)
    g.add_argument("--infeasible", action="store_true", help="plant a point no disk can reach")
    g.add_argument("--kind", choices=("coverage", "hitting", "halfplane"), default="coverage")
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("--input", required=True)
    s.add_argument("--solver", choices=SOLVERS, default="auto")
    s.add_argument("--r", type=int, default=None)
    s.add_argument("--rho", type=int, default=4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--eps", type=float, default=DEFAULT_EPS)
    s.add_argument("--verify-exact", action="store_true", help="exact rational predicates and weights")
    s.add_argument("--debug-invariants", action="store_true")
    s.add_argument("--output", default=None)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="fuzz the solvers against each other")
    v.add_argument("--seeds", default="1..20", help="A..B or a comma list")
    v.add_argument("--sizes", nargs="+", default=["8x8"], help="NxM (or N) per tier")
    v.add_argument("--profiles", nargs="+", default=list(PROFILES))
    v.add_argument("--float", action="store_true", help="compare float runs within 1e-6 instead of exactly")
    v.add_argument("--brute-cap", type=int, default=12, help="largest m checked by brute force")
    v.add_argument("--repro-dir", default=".")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time and count operations over sizes")
    b.add_argument("--sizes", nargs="+", default=["2^10..2^13"])
    b.add_argument("--reps", type=int, default=1)
    b.add_argument("--solvers", nargs="+", default=["fast", "naive"])
    b.add_argument("--r", nargs="+", default=None, help="sweep these r values for the fast solver")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--profile", choices=PROFILES, default="uniform")
    b.add_argument("--out", required=True)
    b.add_argument("--plot", default=None, help="figure path (default: next to the CSV)")
    b.add_argument("--no-plot", action="store_true")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("render", help="draw an instance as SVG")
    r.add_argument("--input", required=True)
    r.add_argument("--solution", default=None)
    r.add_argument("--out", required=True)
    r.add_argument("--dual", action="store_true", help="add the dual panel")
    r.add_argument("--show-cutting", action="store_true")
    r.add_argument("--r", type=int, default=None)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_render)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CliError, InstanceFormatError, UnsupportedInstance, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
