"""Command line interface.

Verbs:
  run      scenario JSON -> metrics CSV + map snapshots
  collect  corpus of PGM maps -> training pair dataset
  genmap   procedural rooms-and-corridors worlds
  eval     PSNR/SSIM over a directory of *.pred.pgm / *.gt.pgm pairs
  bench    run one scenario under several predictors, print a table
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .metrics import psnr, ssim
from .pgmio import read_pgm, save_snapshot
from .runner import ScenarioConfig, collect_dataset, run_exploration
from .worldgen import generate_world


def _cmd_run(args):
    config = ScenarioConfig.from_file(args.config)
    result = run_exploration(config)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "metrics.csv")
    with open(csv_path, "w") as fh:
        fh.write(result.to_csv())
    save_snapshot(result.observed, os.path.join(args.out, "observed.pgm"))
    save_snapshot(result.predicted, os.path.join(args.out, "predicted.pgm"))
    save_snapshot(result.predicted_trinary, os.path.join(args.out, "predicted_classes.pgm"))
    print(
        f"ticks={result.ticks} complete={result.complete} "
        f"coverage={result.final_coverage():.4f} -> {csv_path}"
    )


def _cmd_collect(args):
    out = collect_dataset(
        args.corpus,
        samples=args.samples,
        seed=args.seed,
        out_dir=args.out,
        sensor_range=args.sensor_range,
        window_scale=args.window_scale,
        target_side=args.side,
    )
    print(f"wrote {args.samples} pairs to {out}")


def _cmd_genmap(args):
    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    world = generate_world(args.width, args.height, args.rooms, args.seed, args.resolution)
    save_snapshot(world, args.out)
    free = int((world.cells == 0).sum())
    print(f"{args.out}: {args.width}x{args.height}, {free} free cells")


def _cmd_eval(args):
    names = sorted(
        name[: -len(".pred.pgm")]
        for name in os.listdir(args.dir)
        if name.endswith(".pred.pgm")
    )
    if not names:
        print(f"no *.pred.pgm files in {args.dir}", file=sys.stderr)
        return 1
    psnrs, ssims = [], []
    for name in names:
        pred = read_pgm(os.path.join(args.dir, name + ".pred.pgm"))
        truth = read_pgm(os.path.join(args.dir, name + ".gt.pgm"))
        p = psnr(pred, truth)
        s = ssim(pred, truth)
        psnrs.append(p)
        ssims.append(s)
        print(f"{name}  psnr={p:.3f}  ssim={s:.4f}")
    print(f"mean  psnr={np.mean(psnrs):.3f}  ssim={np.mean(ssims):.4f}")
    return 0


def _cmd_bench(args):
    config = ScenarioConfig.from_file(args.config)
    rows = []
    for name in args.predictors:
        config.predictor = name
        result = run_exploration(config)
        ticks_to_90 = next(
            (rec.t for rec in result.records if rec.coverage >= 0.9), None
        )
        rows.append(
            (
                name,
                result.ticks,
                result.complete,
                result.final_coverage(),
                ticks_to_90 if ticks_to_90 is not None else "-",
            )
        )
    print(f"{'predictor':<10} {'ticks':>6} {'done':>5} {'coverage':>9} {'t@90%':>6}")
    for name, ticks, done, cov, t90 in rows:
        print(f"{name:<10} {ticks:>6} {str(done):>5} {cov:>9.4f} {str(t90):>6}")


def build_parser():
    parser = argparse.ArgumentParser(prog="predexplore")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an exploration scenario")
    p.add_argument("config", help="scenario JSON file")
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("collect", help="collect training pairs from a map corpus")
    p.add_argument("corpus", help="directory of .pgm maps")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="dataset")
    p.add_argument("--sensor-range", type=float, default=8.0)
    p.add_argument("--window-scale", type=float, default=1.0)
    p.add_argument("--side", type=int, default=None, help="resample windows to this side")
    p.set_defaults(func=_cmd_collect)

    p = sub.add_parser("genmap", help="generate a rooms-and-corridors world")
    p.add_argument("out", help="output .pgm path")
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--rooms", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--resolution", type=float, default=1.0)
    p.set_defaults(func=_cmd_genmap)

    p = sub.add_parser("eval", help="PSNR/SSIM over *.pred.pgm / *.gt.pgm pairs")
    p.add_argument("dir", help="directory of prediction pairs")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("bench", help="compare predictors on one scenario")
    p.add_argument("config", help="scenario JSON file")
    p.add_argument("--predictors", nargs="+", default=["null", "dilate", "oracle"])
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())
