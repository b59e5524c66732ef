"""Command-line trainer: hypergraph export in, embedding file out."""

from __future__ import annotations

import argparse
import sys

from .data import TrainerInputError, load_training_file
from .model import TrainConfig
from .training import TrainingDiverged, train, write_embeddings, write_training_log


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gnd-trainer",
        description="Train keyword embeddings over an exported keyword hypergraph.",
    )
    parser.add_argument("--input", required=True, help="hypergraph export file")
    parser.add_argument("--out", required=True, help="embedding file to write")
    parser.add_argument("--epochs", type=int, default=200)
    parser.add_argument("--lr", type=float, default=1e-3)
    parser.add_argument("--layers", type=int, default=2)
    parser.add_argument("--dim", type=int, default=None, help="override the header dimension")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epsilon", type=float, default=1e-6)
    parser.add_argument("--freeze-init", action="store_true")
    parser.add_argument("--log", default=None, help="write an epoch/loss training log")
    parser.add_argument("--state-dump", default=None, help="where to dump state on divergence")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data = load_training_file(args.input)
        cfg = TrainConfig(
            layers=args.layers,
            dim=args.dim if args.dim is not None else data.dim,
            lr=args.lr,
            epochs=args.epochs,
            seed=args.seed,
            epsilon=args.epsilon,
            freeze_init=args.freeze_init,
        )
        result = train(data, cfg, state_dump=args.state_dump)
    except (TrainerInputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TrainingDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 6
    write_embeddings(result, args.out)
    if args.log:
        write_training_log(result, args.log)
    print(
        f"trained {len(result.keywords)} keywords for {cfg.epochs} epochs: "
        f"loss {result.losses[0]:.4f} -> {result.losses[-1]:.4f}; wrote {args.out}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
