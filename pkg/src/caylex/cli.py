"""Command-line front end.

Subcommands: ball, capacity, royden, iso, sobolev, lemma61, pairing, verify.
Reports are written atomically (temp file + rename) as schema-versioned JSON
or as flat CSV (one row per R or n) for plotting.

Exit codes: 0 ok, 1 verification-suite failure, 2 usage error,
3 resource/budget exceeded, 4 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__, dirichlet, geometry, verify
from .cayley import BallSizeError, build_ball
from .funcspace import (FormalSum, dirichlet_seminorm_pow, laplacian,
                        pairing)
from .groups import UnknownFamilyError, make_group

EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_SOLVER = 4

SCHEMA_VERSION = 1


class UsageError(ValueError):
    pass


def parse_radii(spec: str) -> List[int]:
    """Radius schedules: `start:stop` (step 1), `start:stop:+step`,
    `start:stop:*factor` (geometric)."""
    parts = spec.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"bad radii schedule {spec!r}")
    try:
        start, stop = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"bad radii schedule {spec!r}")
    if start < 1 or stop < start:
        raise UsageError(f"bad radii schedule {spec!r}")
    radii = []
    if len(parts) == 2:
        return list(range(start, stop + 1))
    rule = parts[2]
    try:
        if rule.startswith("*"):
            factor = int(rule[1:])
            if factor < 2:
                raise ValueError
            r = start
            while r <= stop:
                radii.append(r)
                r *= factor
        elif rule.startswith("+"):
            step = int(rule[1:])
            if step < 1:
                raise ValueError
            radii.extend(range(start, stop + 1, step))
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"bad radii schedule rule {rule!r}")
    return radii


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".caylex-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _report(command: str, group: Optional[str], parameters: dict, results) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command,
            "group": group, "parameters": parameters, "results": results}


def _emit(report: dict, out: Optional[str], fmt: str,
          csv_rows: Optional[List[dict]] = None) -> None:
    if fmt == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        if csv_rows is None:
            raise UsageError(f"{report['command']} has no CSV form")
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(csv_rows[0].keys()))
        writer.writeheader()
        writer.writerows(csv_rows)
        text = buf.getvalue()
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _fmt_from_args(args) -> str:
    if args.format:
        return args.format
    if args.out and args.out.endswith(".csv"):
        return "csv"
    return "json"


# ---------------------------------------------------------------------------
# subcommands

def cmd_ball(args) -> int:
    group = make_group(args.group)
    ball = build_ball(group, args.radius)
    results = {"radius": ball.radius, "n_vertices": ball.n_vertices,
               "sphere_sizes": ball.sphere_sizes}
    if args.neighbors:
        results["elements"] = [group.format_element(x) for x in ball.elements]
        results["neighbor_table"] = ball.nbr.tolist()
    rows = [{"r": r, "sphere_size": s}
            for r, s in enumerate(ball.sphere_sizes)]
    _emit(_report("ball", group.name, {"radius": args.radius,
                                       "neighbors": bool(args.neighbors)},
                  results), args.out, _fmt_from_args(args), rows)
    print(f"{group.name} B_{args.radius}: {ball.n_vertices} vertices",
          file=sys.stderr)
    return EXIT_OK


def cmd_capacity(args) -> int:
    group = make_group(args.group)
    radii = parse_radii(args.radii)
    scan = dirichlet.parabolicity_scan(group, args.p, radii,
                                       keep_minimizers=False)
    entries = [{"capacity": c, **diag}
               for c, diag in zip(scan.capacities, scan.diagnostics)]
    results = {"group": group.name, "p": scan.p, "entries": entries,
               "verdict": scan.verdict}
    rows = [{"R": e["R"], "capacity": e["capacity"],
             "iterations": e["iterations"], "residual": e["residual"]}
            for e in entries]
    _emit(_report("capacity", group.name,
                  {"p": args.p, "radii": radii}, results),
          args.out, _fmt_from_args(args), rows)
    print(f"{group.name} p={args.p}: verdict {scan.verdict}", file=sys.stderr)
    return EXIT_OK


def cmd_royden(args) -> int:
    group = make_group(args.group)
    radii = parse_radii(args.radii)
    rep = dirichlet.royden_split(group, args.source, radii,
                                 damping=args.damping)
    entries = [{"R": e.radius, "energy": e.energy, "sup": e.sup, "inf": e.inf}
               for e in rep.entries]
    results = {"source": rep.source, "entries": entries,
               "verdict": rep.verdict}
    _emit(_report("royden", group.name,
                  {"source": args.source, "radii": radii,
                   "damping": args.damping}, results),
          args.out, _fmt_from_args(args), entries)
    print(f"{group.name} source={args.source}: verdict {rep.verdict}",
          file=sys.stderr)
    return EXIT_OK


def cmd_iso(args) -> int:
    group = make_group(args.group)
    profile = geometry.isoperimetric_profile(group, args.nmax, args.strategy)
    entries = [{"n": r.n, "boundary_size": r.boundary_size,
                "exact": r.exact,
                "witness": sorted(group.format_element(x)
                                  for x in r.witness)}
               for r in profile.records]
    results = {"strategy": profile.strategy, "entries": entries,
               "truncated_at": profile.truncated_at}
    rows = [{"n": e["n"], "boundary_size": e["boundary_size"],
             "exact": e["exact"]} for e in entries]
    _emit(_report("iso", group.name,
                  {"nmax": args.nmax, "strategy": args.strategy}, results),
          args.out, _fmt_from_args(args), rows)
    return EXIT_OK


def cmd_sobolev(args) -> int:
    group = make_group(args.group)
    profile = geometry.isoperimetric_profile(group, args.nmax, args.strategy)
    isd = geometry.check_ISd(profile, args.d)
    rep = geometry.sobolev_constant(group, args.d, profile,
                                    n_random=args.samples, seed=args.seed)
    results = {"d": args.d, "constant": rep.constant,
               "maximizer": rep.maximizer_kind, "samples": rep.samples,
               "isd_constant": isd.constant, "isd_verdict": isd.verdict}
    if args.d > 2:
        rng = np.random.default_rng(args.seed + 1)
        ball = build_ball(group, 8)
        verification = [geometry.random_nonnegative(group, rng, ball=ball)
                        for _ in range(min(args.samples, 200))]
        done = geometry.sobolev_p2(rep, group, verification)
        results.update({"cprime": done.cprime,
                        "violation_count": done.violation_count,
                        "worst_margin": done.worst_margin,
                        "exponent_identity_residual":
                            done.exponent_identity_residual})
    _emit(_report("sobolev", group.name,
                  {"d": args.d, "samples": args.samples, "seed": args.seed,
                   "nmax": args.nmax, "strategy": args.strategy}, results),
          args.out, _fmt_from_args(args))
    print(f"{group.name} d={args.d}: C = {rep.constant:.6g}", file=sys.stderr)
    return EXIT_OK


def cmd_lemma61(args) -> int:
    group = make_group(args.group)
    rng = np.random.default_rng(args.seed)
    ball = build_ball(group, 5)
    worst = np.inf
    violations = 0
    for _ in range(args.samples):
        alpha = geometry.random_nonnegative(group, rng, ball=ball)
        t = float(rng.uniform(2.0, 4.0)) if args.t is None else args.t
        res = geometry.lemma61_check(alpha, t)
        worst = min(worst, res.margin)
        if res.margin < -1e-12 * (1.0 + res.rhs):
            violations += 1
    r = rng.uniform(0.0, 10.0, size=args.scalar_samples)
    s = rng.uniform(0.0, 1.0, size=args.scalar_samples) * r
    tv = rng.uniform(2.0, 5.0, size=args.scalar_samples)
    margins = geometry.mean_value_step(r, s, tv)
    scalar_bad = int((margins < -1e-9 * (1.0 + r ** tv)).sum())
    results = {"samples": args.samples, "violations": violations,
               "min_margin": float(worst),
               "scalar_samples": args.scalar_samples,
               "scalar_violations": scalar_bad}
    _emit(_report("lemma61", group.name,
                  {"t": args.t, "samples": args.samples, "seed": args.seed,
                   "scalar_samples": args.scalar_samples}, results),
          args.out, _fmt_from_args(args))
    print(f"{group.name}: {violations} violations / {args.samples}",
          file=sys.stderr)
    return EXIT_OK if violations == 0 and scalar_bad == 0 else EXIT_SUITE_FAILURE


def cmd_pairing(args) -> int:
    group = make_group(args.group)
    rng = np.random.default_rng(args.seed)
    ball = build_ball(group, 4)
    max_identity = 0.0
    holder_bad = 0
    max_leak = 0.0
    for i in range(args.samples):
        alpha = _random_sum(group, ball, rng, complex_values=bool(i % 2))
        beta = _random_sum(group, ball, rng, complex_values=bool(i % 3))
        y = ball.elements[int(rng.integers(0, ball.n_vertices))]
        lap_y = laplacian(alpha)(y)
        res = abs(pairing(FormalSum.delta(group, y), alpha)
                  + 2.0 * np.conj(lap_y)) / (1.0 + abs(lap_y))
        max_identity = max(max_identity, res)
        p = args.p
        q = p / (p - 1.0)
        lhs = abs(pairing(alpha, beta, p))
        rhs = dirichlet_seminorm_pow(alpha, p) ** (1 / p) * \
            dirichlet_seminorm_pow(beta, q) ** (1 / q)
        if lhs > rhs * (1.0 + 1e-10) + 1e-12:
            holder_bad += 1
        # edge leakage of the ball-windowed pairing against the exact one
        from .funcspace import BallFunction
        wa = BallFunction.from_formal_sum(ball, alpha, "ball")
        wb = BallFunction.from_formal_sum(ball, beta, "ball")
        max_leak = max(max_leak,
                       abs(pairing(wa, wb, p) - pairing(alpha, beta, p)))
    results = {"p": args.p, "samples": args.samples,
               "max_identity_residual": max_identity,
               "holder_violations": holder_bad,
               "max_window_edge_leakage": max_leak}
    _emit(_report("pairing", group.name,
                  {"p": args.p, "samples": args.samples, "seed": args.seed},
                  results), args.out, _fmt_from_args(args))
    return EXIT_OK if holder_bad == 0 and max_identity <= 1e-12 \
        else EXIT_SUITE_FAILURE


def _random_sum(group, ball, rng, complex_values=False) -> FormalSum:
    k = int(rng.integers(1, 20))
    ids = rng.choice(ball.n_vertices, size=min(k, ball.n_vertices),
                     replace=False)
    data = {}
    for i in ids:
        v = complex(rng.normal(), rng.normal()) if complex_values \
            else float(rng.normal())
        data[ball.elements[int(i)]] = v
    return FormalSum(group, data)


def cmd_verify(args) -> int:
    if args.suite == "all":
        names = list(verify.SUITE_NAMES)
    elif args.suite in verify.SUITE_NAMES:
        names = [args.suite]
    else:
        raise UsageError(f"unknown suite {args.suite!r}")
    results = verify.run_suites(names, args.seed, args.workers)
    for res in results:
        print(res.line())
    ok = all(r.passed for r in results)
    if args.out:
        payload = [{"suite": r.name, "passed": r.passed, "checked": r.checked,
                    "failures": r.failures} for r in results]
        _emit(_report("verify", None,
                      {"suite": args.suite, "seed": args.seed,
                       "workers": args.workers}, payload),
              args.out, "json")
    return EXIT_OK if ok else EXIT_SUITE_FAILURE


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caylex",
        description="Numerical discrete potential theory on finitely "
                    "generated groups.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, radii=False):
        p.add_argument("--group", required=True,
                       help="group spec: Z^d, F_k, or H3")
        p.add_argument("--out", "-o", help="output path (atomic write)")
        p.add_argument("--format", choices=["json", "csv"],
                       help="default: by --out extension, else json")
        if radii:
            p.add_argument("--radii", required=True,
                           help="schedule start:stop[:*factor|:+step]")

    p = sub.add_parser("ball", help="enumerate a Cayley ball")
    common(p)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--neighbors", action="store_true",
                   help="include the (large) neighbor table")
    p.set_defaults(fn=cmd_ball)

    p = sub.add_parser("capacity", help="p-capacity scan of the identity")
    common(p, radii=True)
    p.add_argument("--p", type=float, default=2.0)
    p.set_defaults(fn=cmd_capacity)

    p = sub.add_parser("royden", help="harmonic-extension energy trends")
    common(p, radii=True)
    p.add_argument("--source", required=True,
                   choices=["green-like", "coordinate", "end-separating",
                            "constant"])
    p.add_argument("--damping", type=float, default=0.5)
    p.set_defaults(fn=cmd_royden)

    p = sub.add_parser("iso", help="isoperimetric profile")
    common(p)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--strategy", default="exhaustive",
                   choices=sorted(geometry._STRATEGIES))
    p.set_defaults(fn=cmd_iso)

    p = sub.add_parser("sobolev", help="empirical Sobolev constants")
    common(p)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--strategy", default="exhaustive",
                   choices=sorted(geometry._STRATEGIES))
    p.set_defaults(fn=cmd_sobolev)

    p = sub.add_parser("lemma61", help="D(1) power-estimate sampling")
    common(p)
    p.add_argument("--t", type=float, default=None,
                   help="fixed exponent; default samples t in [2,4]")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--scalar-samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_lemma61)

    p = sub.add_parser("pairing", help="duality pairing identities")
    common(p)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_pairing)

    p = sub.add_parser("verify", help="run a bundled verification suite")
    p.add_argument("--suite", required=True,
                   help="one of %s or 'all'" % ", ".join(verify.SUITE_NAMES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", "-o")
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except (UsageError, UnknownFamilyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BallSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (dirichlet.SolverFailure, dirichlet.NullSequenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
