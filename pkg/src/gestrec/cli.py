"""Command-line entry point: synth / extract / train / loocv."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .config import ConfigError, load_config
from .dataset import DatasetError, load_sequence, scan_dataset
from .evaluation import EvaluationError, class_of, render_summary, run_loocv, write_report
from .features import (
    FEATURE_KINDS,
    FeatureError,
    extract_features,
    feature_filename,
    load_feature_dir,
    write_feature_file,
)
from .finger_motion import ZeroLengthBone
from .geometry import DegenerateInput, NotARotation
from .global_motion import InvalidConfig as InvalidDadConfig
from .network import (
    NetworkError,
    Sample,
    TrainConfig,
    init_model,
    save_checkpoint,
    train,
)
from .skeleton import DEFAULT_LAYOUT, SkeletonError
from .synth import InvalidConfig, builtin_scripts, export_dhg_tree, generate_dataset, parse_scripts

_RUNTIME_ERRORS = (ConfigError, DatasetError, FeatureError, NetworkError, SkeletonError,
                   EvaluationError, InvalidConfig, InvalidDadConfig, ZeroLengthBone,
                   DegenerateInput, NotARotation, OSError)


def _add_config_arg(parser):
    parser.add_argument("--config", type=Path, default=None,
                        help="key = value overrides for pipeline defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gestrec",
        description="Skeleton-based dynamic hand gesture recognition pipeline")
    parser.add_argument("--version", action="version", version=f"gestrec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic DHG-format dataset")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--subjects", type=int, default=6)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scripts", type=Path, default=None,
                   help="gesture script config (default: built-in archetypes)")

    p = sub.add_parser("extract", help="extract feature files from a dataset tree")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--features", default=",".join(FEATURE_KINDS),
                   help="comma-separated subset of: global,finger,skeleton")
    p.add_argument("--jobs", type=int, default=1)
    _add_config_arg(p)

    p = sub.add_parser("train", help="train a classifier from extracted features")
    p.add_argument("--features", type=Path, required=True)
    p.add_argument("--classes", type=int, choices=(14, 28), default=14)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--log", type=Path, default=None,
                   help="epoch log CSV (default: <out>.log.csv)")
    _add_config_arg(p)

    p = sub.add_parser("loocv", help="leave-one-subject-out cross-validation")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--classes", type=int, choices=(14, 28), default=14)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--jobs", type=int, default=1)
    _add_config_arg(p)
    return parser


def cmd_synth(args) -> int:
    scripts = parse_scripts(args.scripts) if args.scripts else builtin_scripts()
    sequences = generate_dataset(scripts, args.subjects, args.trials, args.seed)
    export_dhg_tree(sequences, args.out)
    print(f"wrote {len(sequences)} sequences "
          f"({len(scripts)} scripts x {args.subjects} subjects x {args.trials} trials) "
          f"to {args.out}")
    return 0


def cmd_extract(args, parser) -> int:
    kinds = tuple(k.strip() for k in args.features.split(",") if k.strip())
    for kind in kinds:
        if kind not in FEATURE_KINDS:
            parser.error(f"unknown feature kind: {kind!r} (choose from {FEATURE_KINDS})")
    config = load_config(args.config)
    index = scan_dataset(args.dataset)
    args.out.mkdir(parents=True, exist_ok=True)

    def process(entry):
        seq = load_sequence(entry, DEFAULT_LAYOUT)
        streams = extract_features(seq, config, DEFAULT_LAYOUT, kinds=kinds)
        for kind in kinds:
            name = feature_filename(entry.gesture, entry.finger, entry.subject,
                                    entry.trial, kind)
            write_feature_file(args.out / name, kind, streams[kind],
                               entry.gesture, entry.finger, entry.subject, entry.trial)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            list(pool.map(process, index.entries))
    else:
        for entry in index.entries:
            process(entry)
    print(f"extracted {len(kinds)} x {len(index)} feature files to {args.out}")
    return 0


def cmd_train(args) -> int:
    config = load_config(args.config)
    grouped = load_feature_dir(args.features, kinds=config.branches)
    samples = [
        Sample(streams, class_of(meta["gesture"], meta["finger"], args.classes))
        for meta, streams in grouped
    ]
    first_streams = grouped[0][1]
    dims = {name: first_streams[name].shape[1] for name in config.branches}
    model = init_model(config.branches, dims, args.classes,
                       hidden=config.lstm_hidden, fc_out=config.fc_out,
                       head=config.head, dropout=config.dropout,
                       bidirectional=config.bidirectional, seed=args.seed)
    train_cfg = TrainConfig(
        learning_rate=config.learning_rate, beta1=config.beta1, beta2=config.beta2,
        epsilon=config.epsilon, batch_size=config.batch_size, epochs=config.epochs,
        rng_seed=args.seed, clip_norm=config.clip_norm, stop_accuracy=config.stop_accuracy)
    log = train(model, samples, train_cfg)
    save_checkpoint(model, args.out)
    log_path = args.log or Path(str(args.out) + ".log.csv")
    rows = ["epoch,loss,train_accuracy"]
    rows += [f"{e.epoch},{e.loss:.6f},{e.accuracy:.6f}" for e in log]
    log_path.write_text("\n".join(rows) + "\n")
    print(f"trained on {len(samples)} sequences for {len(log)} epochs; "
          f"final train accuracy {log[-1].accuracy:.4f}")
    print(f"checkpoint: {args.out}\nepoch log: {log_path}")
    return 0


def cmd_loocv(args) -> int:
    config = load_config(args.config)
    index = scan_dataset(args.dataset)
    sequences = [load_sequence(e, DEFAULT_LAYOUT) for e in index.entries]
    report = run_loocv(sequences, config, classes=args.classes, seed=args.seed,
                       progress=print, jobs=args.jobs)
    write_report(report, args.out)
    print()
    print(render_summary(report), end="")
    print(f"report files in {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            return cmd_synth(args)
        if args.command == "extract":
            return cmd_extract(args, parser)
        if args.command == "train":
            return cmd_train(args)
        if args.command == "loocv":
            return cmd_loocv(args)
    except _RUNTIME_ERRORS as e:
        print(f"gestrec {args.command}: error: {e}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
