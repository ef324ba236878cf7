"""Command-line front end.

Exit codes: 0 success, 2 usage or domain error, 3 capacity exceeded,
4 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import CapacityError, ConvergenceError, DomainError
from .exact_tv import DeckSpec, tv_exact
from .planner import max_steps_for_deck, min_deck_for_threshold, solve_c_for_epsilon
from .profile import profile, profile_d1_closed, profile_value
from .simulator import RNG_ALGORITHM, empirical_suitcount_check, simulate_walks, tv_monte_carlo

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_IO = 0, 2, 3, 4
THREADS_ENV = "DECKWALK_THREADS"

TABLE1_C = (2.00, 2.94, 5.35, 24.70, 48.89, 242.47)
TABLE1_EPS = (0.160, 0.100, 0.050, 0.010, 0.005, 0.001)


@dataclass
class RunRecord:
    command: str
    params: dict
    seed: int | None = None
    method: str | None = None
    values: dict = field(default_factory=dict)
    error_bound: float | str | None = None
    wall_time: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls(**json.loads(text))


def fmt(x: float) -> str:
    return format(x, ".17g")


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_exact(args) -> RunRecord:
    deck = DeckSpec.from_cards(args.d, args.N)
    est = tv_exact(deck, args.n, mode=args.mode, workers=args.threads)
    values = {"value": est.value}
    if est.exact is not None:
        values["fraction"] = str(est.exact)
    return RunRecord("exact", {"d": args.d, "n": args.n, "N": args.N, "mode": args.mode}, None, est.method, values, est.error_bound)


def cmd_profile(args) -> RunRecord:
    method = args.method or ("closed" if args.d in (1, 2) else "quadrature")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pv = profile_value(args.c, args.d, method)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return RunRecord(
        "profile",
        {"d": args.d, "c": args.c, "method": method},
        None,
        method,
        {"value": pv.value, "outside_hypothesis": pv.outside_hypothesis},
        pv.quadrature_error,
    )


def cmd_table1(args) -> RunRecord:
    forward = [{"c": c, "profile": profile_d1_closed(c)} for c in TABLE1_C]
    inverse = [{"epsilon": e, "c": solve_c_for_epsilon(1, e)} for e in TABLE1_EPS]
    return RunRecord("table1", {"d": 1}, None, "closed", {"forward": forward, "inverse": inverse}, 0.0)


def cmd_sweep(args) -> RunRecord:
    if args.c_min < 2 * args.d:
        raise DomainError(f"c_min must be >= 2d = {2 * args.d}")
    if args.c_max < args.c_min or args.points < 2:
        raise DomainError("need c_max >= c_min and at least 2 points")
    grid = np.geomspace(args.c_min, args.c_max, args.points)
    grid[0], grid[-1] = args.c_min, args.c_max
    rows = [(fmt(float(c)), fmt(profile(float(c), args.d))) for c in grid]
    if args.out:
        _write_csv(args.out, ("c", "profile"), rows)
    else:
        sys.stdout.write("c,profile\n" + "".join(f"{a},{b}\n" for a, b in rows))
    params = {"d": args.d, "c_min": args.c_min, "c_max": args.c_max, "points": args.points, "out": args.out}
    return RunRecord("sweep", params, None, "closed" if args.d in (1, 2) else "quadrature", {"rows": len(rows)}, 0.0)


def cmd_plan(args) -> RunRecord:
    if (args.n is None) == (args.N is None):
        raise DomainError("give exactly one of --n or --N")
    if args.n is not None:
        res = min_deck_for_threshold(args.d, args.n, args.eps, refine=not args.no_refine)
        key = "N"
    else:
        res = max_steps_for_deck(args.d, args.N, args.eps, refine=not args.no_refine)
        key = "n"
    params = {"d": args.d, "eps": args.eps, "n": args.n, "N": args.N, "refine": not args.no_refine}
    values = {
        key: res.answer,
        "c_star": res.c_star,
        "achieved_value": res.achieved_value,
        "feasible": res.feasible,
        f"asymptotic_{key}": res.asymptotic_answer,
    }
    return RunRecord("plan", params, None, res.method, values, None)


def cmd_simulate(args) -> RunRecord:
    deck = DeckSpec.from_cards(args.d, args.N)
    params = {"d": args.d, "N": args.N, "n": args.n, "samples": args.samples, "estimator": args.estimator,
              "out": args.out, "rng": RNG_ALGORITHM}
    if args.estimator == "tv":
        est = tv_monte_carlo(deck, args.n, args.samples, args.seed)
        values, bound = {"value": est.value}, est.error_bound
        if args.out:
            _write_csv(args.out, ("value", "error_bound"), [(fmt(est.value), fmt(est.error_bound))])
    elif args.estimator == "suitcount":
        rep = empirical_suitcount_check(deck, args.n, args.samples, args.seed)
        values = {"statistic": rep.statistic, "dof": rep.dof, "p_value": rep.p_value, "passed": rep.passed}
        bound = None
        if args.out:
            rows = [
                (" ".join(map(str, k)), rep.observed.get(k, 0), fmt(rep.expected[k]))
                for k in sorted(rep.expected)
            ]
            _write_csv(args.out, ("lambda", "observed", "expected"), rows)
    else:
        walks = simulate_walks(deck, args.n, args.samples, args.seed)
        header = ["sample", "step", "suit"] + [f"x{i + 1}" for i in range(args.d)]
        rows = []
        for k, w in enumerate(walks):
            for step, pos in enumerate(w.positions):
                suit = w.suits[step - 1] if step else ""
                rows.append([k, step, suit, *pos])
        if args.out:
            _write_csv(args.out, header, rows)
        else:
            sys.stdout.write(",".join(header) + "\n" + "".join(",".join(map(str, r)) + "\n" for r in rows))
        final = [w.positions[-1] for w in walks]
        values = {"walks": len(walks), "mean_sq_displacement": float(np.mean([sum(x * x for x in p) for p in final]))}
        bound = None
    return RunRecord("simulate", params, args.seed, args.estimator, values, bound)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deckwalk", description="Random walks simulated with a deck of cards.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--json", action="store_true", help="print the run record as JSON")
    parser.add_argument("--threads", type=int, default=None, help=f"worker processes (default: ${THREADS_ENV} or CPU count)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact distance d_n(N)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--mode", choices=("rational", "float"), default="float")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("profile", help="limit profile at ratio c")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--method", choices=("closed", "quadrature"), default=None)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("table1", help="profile values and inverse ratios for d = 1")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("sweep", help="profile on a log-spaced grid of c, as CSV")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c-min", type=float, required=True)
    p.add_argument("--c-max", type=float, required=True)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plan", help="deck size for a step budget, or steps for a deck")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--no-refine", action="store_true", help="skip exact refinement")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="shuffle decks and deal walks")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--estimator", choices=("tv", "suitcount", "walks"), default="walks")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)
    return parser


def _print_human(rec: RunRecord) -> None:
    if rec.command == "table1":
        print(f"{'c':>8}  {'profile':>10}")
        for row in rec.values["forward"]:
            print(f"{row['c']:8.2f}  {row['profile']:10.6f}")
        print(f"{'epsilon':>8}  {'c':>10}")
        for row in rec.values["inverse"]:
            print(f"{row['epsilon']:8.3f}  {row['c']:10.4f}")
        return
    if rec.command == "sweep" or (rec.command == "simulate" and rec.method == "walks" and not rec.params.get("out")):
        return
    for key, val in rec.values.items():
        print(f"{key}: {fmt(val) if isinstance(val, float) else val}")
    if rec.method is not None:
        print(f"method: {rec.method}")
    if rec.error_bound is not None:
        eb = rec.error_bound
        print(f"error_bound: {fmt(eb) if isinstance(eb, float) else eb}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        args.threads = default_threads()
    start = time.perf_counter()
    try:
        rec = args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    rec.wall_time = time.perf_counter() - start
    if args.json:
        print(rec.to_json())
    else:
        _print_human(rec)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
