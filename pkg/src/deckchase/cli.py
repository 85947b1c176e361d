"""Command line front end: batch runs, the live server, pose-log replay."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import logio, metrics
from .scenarios import BUILDERS, load_scenario
from .simulate import SimConfig, run_estimation, run_tracking, write_outputs
from .usv_filter import PoseMeasurement, make_filter

MODES = ("curvilinear", "baseline")


def _parse_seeds(text: str) -> list[int]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part]


def _out_root(args) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get("DECKCHASE_OUT", "runs"))


def _print_preview(scenario_name: str, pooled: dict) -> None:
    for mode, reports in pooled.items():
        for mark, rep in sorted(reports.items()):
            print(f"{scenario_name} {mode} {mark:.1f}s: "
                  f"mean {rep.mean_m:.3f} m, max {rep.max_m:.3f} m, "
                  f"std {rep.std_m:.3f} m, n={rep.n}")
    if set(pooled) == set(MODES):
        for mark in sorted(next(iter(pooled.values())).keys()):
            num = pooled["baseline"][mark].mean_m
            den = pooled["curvilinear"][mark].mean_m
            if den > 0:
                print(f"{scenario_name} {mark:.1f}s baseline/curvilinear "
                      f"mean ratio: {num / den:.2f}")


def cmd_run(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ValueError as exc:
        print(exc, file=sys.stderr)
        return 2
    if args.duration is not None:
        scenario = replace(scenario, duration=args.duration)
    if args.no_noise:
        scenario = replace(scenario, noise=False)
    modes = list(MODES) if args.mode == "both" else [args.mode]
    seeds = _parse_seeds(args.seeds)
    if args.attempts is not None:
        seeds = list(range(seeds[0], seeds[0] + args.attempts))
    cfg = SimConfig()
    root = _out_root(args)

    results = {mode: [] for mode in modes}
    for mode in modes:
        for seed in seeds:
            if args.estimator_only:
                res = run_estimation(scenario, mode, seed, cfg)
            elif args.land:
                trig = args.trigger if args.trigger is not None else "auto"
                res = run_tracking(scenario, mode, seed, cfg, trigger=trig)
            else:
                res = run_tracking(scenario, mode, seed, cfg)
            results[mode].append(res)
            write_outputs(res, root / scenario.name / mode / f"seed{seed}")

    if args.estimator_only:
        pooled = {mode: metrics.pooled_prediction_errors(res_list)
                  for mode, res_list in results.items()}
        _print_preview(scenario.name, pooled)
        entries = [(scenario.name, mode, rep)
                   for mode, reports in pooled.items()
                   for rep in reports.values()]
        metrics.write_preview_table(root / scenario.name / "preview.csv",
                                    entries)
    elif args.land:
        for mode, res_list in results.items():
            stats = metrics.landing_stats(res_list)
            print(f"{scenario.name} {mode}: {stats.touchdowns}/{stats.attempts} "
                  f"touchdowns ({100 * stats.success_rate:.0f}%)")
    else:
        for mode, res_list in results.items():
            try:
                rep = metrics.turn_tracking(res_list[0])
                within = ", ".join(f"{100 * f:.0f}% within {r} m"
                                   for r, f in rep.fraction_within)
                print(f"{scenario.name} {mode}: median turn offset "
                      f"{rep.median_m:.2f} m ({within})")
            except metrics.EmptySelection:
                print(f"{scenario.name} {mode}: no turning ticks to report")
    print(f"outputs under {root / scenario.name}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    frontend = args.frontend
    if frontend is None:
        for candidate in (Path("frontend/dist"), Path("frontend")):
            if (candidate / "index.html").is_file():
                frontend = candidate
                break
    app = create_app(mode=args.mode, seed=args.seed, frontend_dir=frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_replay(args) -> int:
    try:
        poses = logio.read_pose_log(args.poses)
    except (OSError, ValueError) as exc:
        print(exc, file=sys.stderr)
        return 2
    modes = list(MODES) if args.mode == "both" else [args.mode]
    for mode in modes:
        filt = make_filter(mode)
        rows = []
        for t, x, y, z, eta in poses:
            filt.ingest(PoseMeasurement(t=t, x=x, y=y, z=z, eta=eta))
            rows.append((t, *filt.state))
        if args.out:
            out = Path(args.out) / f"replay_{mode}.csv"
            out.parent.mkdir(parents=True, exist_ok=True)
            logio.write_csv(out, ("t", "x", "y", "z", "eta", "vx", "vy",
                                  "vz", "eta_dot"), rows)
            print(f"{mode}: wrote {len(rows)} estimates to {out}")
        s = filt.state
        print(f"{mode}: final estimate x={s[0]:.3f} y={s[1]:.3f} "
              f"eta={s[3]:.3f} speed={(s[4] ** 2 + s[5] ** 2) ** 0.5:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deckchase",
        description="Vessel-deck pursuit and landing simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run scripted scenarios in batch")
    run_p.add_argument("--scenario", default="figure8",
                       help=f"one of {', '.join(sorted(BUILDERS))} or a "
                            f"scenario .json path")
    run_p.add_argument("--mode", default="curvilinear",
                       choices=(*MODES, "both"))
    run_p.add_argument("--seeds", default="0", help='e.g. "0..9" or "1,2,3"')
    run_p.add_argument("--attempts", type=int, default=None,
                       help="run this many seeds starting at the first one")
    run_p.add_argument("--out", default=None,
                       help="output root (default $DECKCHASE_OUT or ./runs)")
    run_p.add_argument("--estimator-only", action="store_true",
                       help="no aircraft: log long-range deck predictions")
    run_p.add_argument("--land", action="store_true",
                       help="execute one landing attempt per seed")
    run_p.add_argument("--trigger", type=float, default=None,
                       help="fixed landing trigger time (default: seeded draw)")
    run_p.add_argument("--duration", type=float, default=None)
    run_p.add_argument("--no-noise", action="store_true")
    run_p.set_defaults(func=cmd_run)

    serve_p = sub.add_parser("serve", help="live steering server")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.add_argument("--mode", default="curvilinear", choices=MODES)
    serve_p.add_argument("--seed", type=int, default=0)
    serve_p.add_argument("--frontend", default=None,
                         help="directory with the browser UI build")
    serve_p.set_defaults(func=cmd_serve)

    replay_p = sub.add_parser("replay", help="run the filter over a pose log")
    replay_p.add_argument("--poses", required=True,
                          help="CSV with header t,x,y,z,eta")
    replay_p.add_argument("--mode", default="both", choices=(*MODES, "both"))
    replay_p.add_argument("--out", default=None)
    replay_p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
