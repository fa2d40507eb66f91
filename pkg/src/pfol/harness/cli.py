"""Command line front end.

Subcommands:
  run     execute a (T, seed) grid for one algorithm and emit rows
  sweep   run, then fit the log-log regret exponent over T
  verify  run with per-step invariant checks on; nonzero exit on failure
  bounds  print schedule parameters and certified bounds without running

Exit codes: 0 success, 2 at least one cell failed to execute, 3 at least
one verification check failed. PFOL_THREADS overrides --threads.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .. import ofw_bandit, ofw_full
from ..geometry import from_config
from ..losses import ADVERSARY_KINDS, AdversarySpec, generate_sequence
from ..rng import Rng
from .experiment import ALGOS, ExperimentSpec, fit_slope, run_experiment


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", choices=ALGOS, default="ofw")
    p.add_argument("--set", choices=["ball", "box", "l1"], default="ball")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--radius", type=float, default=1.0, help="ball/l1 radius or box half-width")
    p.add_argument("--T", type=int, action="append", help="horizon; repeatable")
    p.add_argument("--seed", type=int, action="append", help="seed; repeatable")
    p.add_argument("--adversary", choices=list(ADVERSARY_KINDS), default="drifting-center")
    p.add_argument("--seed-offset", type=int, default=0)
    p.add_argument("--drift-step", type=float, default=None)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--T0", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--alternate-b", action="store_true")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--solver-thread", action="store_true")
    p.add_argument("--timing", action="store_true", help="measure wall_ms (breaks byte determinism)")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--config", default=None, help="JSON file of flag defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pfol", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "sweep", "verify", "bounds"):
        p = sub.add_parser(name)
        _common_flags(p)
    return parser


def _set_config(args) -> dict:
    if args.set == "box":
        return {"kind": "box", "dim": args.dim, "halfwidths": [args.radius] * args.dim}
    return {"kind": args.set, "dim": args.dim, "radius": args.radius}


def _spec_from_args(args, verify: bool) -> ExperimentSpec:
    if not args.T:
        raise SystemExit("at least one --T is required")
    return ExperimentSpec(
        algo=args.algo,
        set_config=_set_config(args),
        Ts=tuple(args.T),
        seeds=tuple(args.seed) if args.seed else (0,),
        adversary=AdversarySpec(
            kind=args.adversary,
            alpha=args.alpha,
            seed_offset=args.seed_offset,
            drift_step=args.drift_step,
        ),
        alpha=args.alpha,
        b=args.b,
        T0=args.T0,
        delta=args.delta,
        K=args.K,
        c=args.c,
        alternate_b=args.alternate_b,
        verify=verify or args.verify,
        solver_thread=args.solver_thread,
        timing=args.timing,
        threads=args.threads,
        out=args.out,
        fmt=args.format,
    )


def _emit(result) -> None:
    if not result.spec.out:
        text = result.json_text() if result.spec.fmt == "json" else result.csv_text()
        sys.stdout.write(text)
    for key, msg in sorted(result.errors.items()):
        print(f"error: cell T={key[0]} seed={key[1]}: {msg}", file=sys.stderr)


def _cmd_run(args) -> int:
    result = run_experiment(_spec_from_args(args, verify=False))
    _emit(result)
    return 2 if result.errors else 0


def _cmd_sweep(args) -> int:
    spec = _spec_from_args(args, verify=False)
    result = run_experiment(spec)
    _emit(result)
    by_T: dict = {}
    for row in result.rows:
        by_T.setdefault(row.T, []).append(row.regret)
    Ts = sorted(by_T)
    means = [float(np.mean(by_T[T])) for T in Ts]
    try:
        fit = fit_slope(Ts, means)
        print(
            f"slope fit ({spec.algo}): exponent={fit.exponent:.4f} "
            f"intercept={fit.intercept:.4f} r2={fit.r2:.4f}",
            file=sys.stderr,
        )
    except ValueError as exc:
        print(f"slope fit unavailable: {exc}", file=sys.stderr)
    return 2 if result.errors else 0


def _cmd_verify(args) -> int:
    result = run_experiment(_spec_from_args(args, verify=True))
    _emit(result)
    failed = False
    for (T, seed), report in sorted(result.reports.items()):
        for check in report.checks:
            status = "pass" if check.passed else "FAIL"
            where = f" [{check.location}]" if check.location else ""
            print(
                f"{status} T={T} seed={seed} {check.name} margin={check.margin:.3g}{where}",
                file=sys.stderr,
            )
            failed = failed or not check.passed
    if result.errors:
        return 2
    return 3 if failed else 0


def _cmd_bounds(args) -> int:
    if not args.T:
        raise SystemExit("at least one --T is required")
    set_ = from_config(_set_config(args))
    seed = args.seed[0] if args.seed else 0
    adversary = AdversarySpec(
        kind=args.adversary,
        alpha=args.alpha,
        seed_offset=args.seed_offset,
        drift_step=args.drift_step,
    )
    for T in args.T:
        rng = Rng(seed).substream(f"T={T}").substream(f"adversary/{args.seed_offset}")
        losses = generate_sequence(adversary, T, set_.n, set_, rng)
        G, M = losses.bounds.G, losses.bounds.M
        R, r = set_.outer_radius, set_.inner_radius
        print(f"T={T} set={set_.kind} dim={set_.n} G={G:.6g} M={M:.6g} R={R:.6g} r={r:.6g}")
        if args.algo == "ofw":
            b, T0 = ofw_full.gap_schedule(G, R, args.alpha, alternate_b=args.alternate_b)
            print(f"  b={b:.6g} T0={T0:.6g} regret_bound={ofw_full.regret_bound(G, R, args.alpha, T):.6g} lmo_bound={T}")
        elif args.algo == "ofw-bandit":
            cfg = ofw_bandit.bandit_params(set_.n, M, G, R, r, args.alpha, T, c=args.c)
            cfg = ofw_bandit.with_overrides(cfg, delta=args.delta, K=args.K, T0=args.T0)
            reg, lmo = ofw_bandit.bandit_bounds(cfg, losses.bounds, r, R)
            print(
                f"  c={cfg.c:.6g} delta={cfg.delta:.6g} K={cfg.K} T0={cfg.T0:.6g} "
                f"regret_bound={reg:.6g} lmo_bound={lmo:.6g}"
            )
        elif args.algo == "ogd":
            from ..baselines import ogd_regret_bound

            print(f"  regret_bound={ogd_regret_bound(G, args.alpha, T):.6g}")
        else:
            print("  no certified bounds for this algorithm")
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    parser = build_parser()
    list_defaults = {}
    if known.config:
        with open(known.config, encoding="utf-8") as fh:
            defaults = json.load(fh)
        # list-valued flags are merged after parsing; argparse's append
        # action would otherwise mutate the default list
        list_defaults = {k: defaults.pop(k) for k in ("T", "seed") if k in defaults}
        parser.set_defaults(**defaults)
        for sub_action in parser._subparsers._group_actions:
            for sub in sub_action.choices.values():
                sub.set_defaults(**defaults)
    args = parser.parse_args(argv)
    if getattr(args, "T", None) is None and "T" in list_defaults:
        args.T = [int(v) for v in list_defaults["T"]]
    if getattr(args, "seed", None) is None and "seed" in list_defaults:
        args.seed = [int(v) for v in list_defaults["seed"]]
    handler = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "verify": _cmd_verify,
        "bounds": _cmd_bounds,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
