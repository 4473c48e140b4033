"""Command-line entry points.

Subcommands:
    train <config>             train, writing <out>/<stem>.csv and <stem>.ckpt
    eval <checkpoint> <config> print test accuracy of a saved network
    ablate <config>            paired runs with/without the harmonic activation
    analyze-spectrum <dir>     emit the sine/ReLU spectrum CSVs

Exit codes: 0 success, 2 config error, 3 data error, 4 numerical abort.
"""

import argparse
import sys
from pathlib import Path

from .analysis import run_analysis
from .checkpoint import load_state
from .config import load_config
from .errors import ConfigError, DataError, TrainingAborted
from .networks import build_network
from .train import Trainer, evaluate, load_datasets, write_metrics_csv


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None, help="override optimizer.seed")
    parser.add_argument("--iterations", type=int, default=None,
                        help="override optimizer.iterations")
    parser.add_argument("--out", type=Path, default=Path("runs"),
                        help="output directory for metrics and checkpoints")
    parser.add_argument("--data-root", type=Path, default=None,
                        help="override data.root from the config")


def build_parser():
    parser = argparse.ArgumentParser(prog="spectralnn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a network from a config")
    p_train.add_argument("config", type=Path)
    _add_common(p_train)

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint on the test split")
    p_eval.add_argument("checkpoint", type=Path)
    p_eval.add_argument("config", type=Path)
    p_eval.add_argument("--data-root", type=Path, default=None)

    p_ablate = sub.add_parser(
        "ablate", help="train twice (with/without the harmonic activation)"
    )
    p_ablate.add_argument("config", type=Path)
    _add_common(p_ablate)

    p_spec = sub.add_parser("analyze-spectrum", help="emit spectrum analysis CSVs")
    p_spec.add_argument("out_dir", type=Path)
    return parser


def _load_cfg(args):
    cfg = load_config(args.config)
    return cfg.with_overrides(
        seed=getattr(args, "seed", None),
        iterations=getattr(args, "iterations", None),
    )


def _run_training(cfg, args, stem):
    train_set, test_set = load_datasets(cfg, args.data_root)
    trainer = Trainer(cfg, train_set, test_set)
    points = trainer.run()
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.out / f"{stem}.csv"
    ckpt_path = args.out / f"{stem}.ckpt"
    write_metrics_csv(csv_path, points)
    trainer.save_checkpoint(ckpt_path)
    return points, csv_path, ckpt_path


def cmd_train(args):
    cfg = _load_cfg(args)
    points, csv_path, ckpt_path = _run_training(cfg, args, args.config.stem)
    final = points[-1]
    print(f"final accuracy {final.accuracy:.5f} after {final.iteration} iterations")
    print(f"metrics: {csv_path}")
    print(f"checkpoint: {ckpt_path}")
    return 0


def cmd_eval(args):
    cfg = load_config(args.config)
    train_set, test_set = load_datasets(cfg, args.data_root)
    network = build_network(cfg, train_set.class_count)
    network.load_state(load_state(args.checkpoint))
    accuracy = evaluate(network, test_set)
    correct = round(accuracy * len(test_set))
    print(f"accuracy {accuracy:.5f} ({correct}/{len(test_set)})")
    return 0


def cmd_ablate(args):
    cfg = _load_cfg(args)
    if cfg.variant != "frequency":
        raise ConfigError("ablate requires a frequency-variant config")
    results = {}
    for label, enabled in (("with", True), ("without", False)):
        variant_cfg = cfg.with_overrides(use_2srelu=enabled)
        points, csv_path, _ = _run_training(
            variant_cfg, args, f"{args.config.stem}_{label}"
        )
        results[label] = points[-1].accuracy
        print(f"{label} harmonic activation: accuracy {points[-1].accuracy:.5f} "
              f"({csv_path})")
    err_with = 100.0 * (1.0 - results["with"])
    err_without = 100.0 * (1.0 - results["without"])
    print(f"error with: {err_with:.2f}%  error without: {err_without:.2f}%  "
          f"difference: {err_without - err_with:+.2f} points")
    return 0


def cmd_analyze_spectrum(args):
    files = run_analysis(args.out_dir)
    for name in sorted(files):
        print(files[name])
    return 0


_COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "analyze-spectrum": cmd_analyze_spectrum,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except TrainingAborted as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
