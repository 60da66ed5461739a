"""Command line interface: train a checkpoint, serve it over TCP."""

from __future__ import annotations

import argparse
import sys

from .losses import LossWeights
from .model import NetworkConfig
from .train import load_checkpoint, train


def _cmd_train(args):
    config = None
    if args.side is not None:
        config = NetworkConfig(
            side=args.side,
            base_channels=args.channels,
            patch_size=args.patch_size,
        )
    weights = LossWeights(args.w_adv, args.w_perc, args.w_l1)
    result = train(
        args.dataset,
        args.out,
        config=config,
        weights=weights,
        epochs=args.epochs,
        seed=args.seed,
        batch_size=args.batch_size,
        lr=args.lr,
        adversarial_family=args.adversarial,
    )
    meta = result["meta"]
    print(
        f"checkpoint -> {result['checkpoint']} "
        f"({meta['parameter_count']} parameters, {meta['train_seconds']}s)"
    )


def _cmd_serve(args):
    from .server import PredictionHandler, serve

    generator, meta = load_checkpoint(args.checkpoint)
    handler = PredictionHandler(generator, meta["network"]["side"])
    serve(args.host, args.port, handler)


def build_parser():
    parser = argparse.ArgumentParser(prog="neuralpred")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train on a collected pair dataset")
    p.add_argument("dataset", help="dataset directory (manifest.json + pairs)")
    p.add_argument("--out", default="checkpoint", help="checkpoint directory")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--lr", type=float, default=2e-4)
    p.add_argument("--side", type=int, default=None, help="network input side (default: dataset side)")
    p.add_argument("--channels", type=int, default=8)
    p.add_argument("--patch-size", type=int, default=8)
    p.add_argument("--w-adv", type=float, default=10.0)
    p.add_argument("--w-perc", type=float, default=30.0)
    p.add_argument("--w-l1", type=float, default=100.0)
    p.add_argument("--adversarial", choices=("hinge", "vanilla", "least-squares"), default="hinge")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("serve", help="serve a checkpoint over the frame protocol")
    p.add_argument("checkpoint", help="checkpoint directory from train")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, required=True)
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())
