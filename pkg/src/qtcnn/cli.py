"""Command-line entry points: synth, prepare, train, backtest, bench.

Settings resolve in three layers: built-in defaults, then `key=value` lines
from --config, then explicit flags.  One root --seed feeds every stage
through named substreams, so a full pipeline rerun with the same inputs is
bit-for-bit reproducible.  Exit codes: 0 success, 1 stage failure, 2 usage.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from . import backtest as bt
from . import datapipe as dp
from .errors import ConfigError, DataError, DegenerateSeriesError, NotFittedError
from .fingerprint import config_fingerprint
from .models import (
    TrainConfig,
    load_checkpoint,
    momentum_vol_score,
    predict_scores,
    save_checkpoint,
    train,
)
from .seeding import stage_rng

log = logging.getLogger(__name__)

DEFAULTS: dict[str, dict] = {
    "synth": {"out": "panel.csv", "stocks": 50, "days": 300, "rho": 0.5, "seed": 0},
    "prepare": {
        "panel": None,
        "stock_list": None,
        "out_dir": "prepared",
        "p": 200,
        "seq_len": 20,
        "stride": None,
        "fraction": None,
        "seed": 0,
    },
    "train": {
        "data": "prepared",
        "out": "model.npz",
        "model": "qtcnn",
        "n_qubits": 8,
        "depth": 3,
        "qnn_layers": 2,
        "epochs": 50,
        "batch_size": None,
        "lr": None,
        "weight_decay": 1e-2,
        "dropout": 0.1,
        "seed": 0,
    },
    "backtest": {
        "data": "prepared",
        "checkpoint": None,
        "model": None,
        "k": 200,
        "n_boot": 1000,
        "score_mode": "model",
        "workers": 1,
        "out": "report.txt",
        "seed": 0,
    },
    "bench": {
        "out": "bench.txt",
        "n_qubits": 8,
        "depth": 3,
        "batch_size": 16,
        "repeats": 2,
        "seed": 0,
    },
}

# explicit types for options whose default is None
OPTION_TYPES: dict[str, type] = {
    "panel": str,
    "stock_list": str,
    "stride": int,
    "fraction": float,
    "batch_size": int,
    "lr": float,
    "checkpoint": str,
    "model": str,
}


def _option_type(command: str, key: str) -> type:
    default = DEFAULTS[command][key]
    if default is None:
        return OPTION_TYPES[key]
    return type(default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtcnn",
        description="Hybrid quantum-classical cross-sectional return ranking.",
    )
    parser.add_argument("--verbose", action="store_true", help="enable info logging")
    sub = parser.add_subparsers(dest="command", required=True)
    help_text = {
        "synth": "generate a synthetic daily price panel CSV",
        "prepare": "turn a panel CSV into train/test sample sets",
        "train": "fit a model on prepared training samples",
        "backtest": "score test samples and write a long-short report",
        "bench": "time simulator backends and per-batch training cost",
    }
    for command, defaults in DEFAULTS.items():
        p = sub.add_parser(command, help=help_text[command])
        p.add_argument("--config", default=None, help="key=value settings file")
        for key in defaults:
            p.add_argument(
                f"--{key.replace('_', '-')}",
                dest=key,
                type=_option_type(command, key),
                default=None,
                help=f"default: {defaults[key]}",
            )
    return parser


def parse_config_file(path: str) -> dict[str, str]:
    """key=value per line; blank lines and # comments ignored."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        values[key.strip()] = value.strip()
    return values


def resolve_settings(args: argparse.Namespace) -> SimpleNamespace:
    """Defaults, then config file, then explicit flags."""
    command = args.command
    values = dict(DEFAULTS[command])
    if args.config is not None:
        for key, raw in parse_config_file(args.config).items():
            if key not in values:
                raise ConfigError(f"unknown config key {key!r} for command {command}")
            kind = _option_type(command, key)
            try:
                values[key] = kind(raw)
            except ValueError as exc:
                raise ConfigError(f"config key {key}: cannot parse {raw!r} as {kind.__name__}") from exc
    for key in values:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return SimpleNamespace(**values)


# ---------------------------------------------------------------------------
# commands


def cmd_synth(s: SimpleNamespace) -> int:
    panel = dp.generate_synthetic(
        dp.SynthConfig(n_stocks=s.stocks, n_days=s.days, rho=s.rho), seed=s.seed
    )
    dp.write_panel_csv(panel, s.out)
    print(f"wrote {len(panel)} rows ({s.stocks} stocks x {s.days} days) to {s.out}")
    return 0


def cmd_prepare(s: SimpleNamespace) -> int:
    if s.panel is None:
        raise ConfigError("prepare requires --panel")
    panel = dp.load_panel(s.panel, stock_list_path=s.stock_list)
    train_set, test_set, stats = dp.prepare(
        panel, p=s.p, seq_len=s.seq_len, stride=s.stride, fraction=s.fraction, seed=s.seed
    )
    out_dir = Path(s.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dp.save_samples(out_dir / "train.npz", train_set)
    dp.save_samples(out_dir / "test.npz", test_set)
    summary = " ".join(f"{key}={value}" for key, value in sorted(stats.items()))
    (out_dir / "stats.txt").write_text(summary + "\n", encoding="utf-8")
    print(f"prepared {stats['n_train_samples']} train / {stats['n_test_samples']} test samples in {out_dir}")
    print(summary)
    return 0


def cmd_train(s: SimpleNamespace) -> int:
    if s.model == "baseline":
        raise ConfigError("the baseline score has no trainable parameters; run backtest --model baseline")
    samples = dp.load_samples(Path(s.data) / "train.npz")
    config = TrainConfig(
        model=s.model,
        n_qubits=s.n_qubits,
        depth=s.depth,
        qnn_layers=s.qnn_layers,
        epochs=s.epochs,
        batch_size=s.batch_size,
        lr=s.lr,
        weight_decay=s.weight_decay,
        dropout=s.dropout,
        seed=s.seed,
    )
    fitted, curve = train(samples, config)
    fingerprint = config_fingerprint(config.as_dict())
    save_checkpoint(s.out, fitted, config, fingerprint)
    final = repr(curve[-1]) if curve else "n/a"
    print(f"trained model={s.model} epochs={len(curve)} final_loss={final} checkpoint={s.out}")
    return 0


def _scores_for_backtest(s: SimpleNamespace, test_set) -> tuple[np.ndarray, str, dict]:
    """Resolve the score vector, the reported model name, and fingerprint
    ingredients for one backtest invocation."""
    if s.score_mode == "foresight":
        # debug oracle: score by the realized target itself
        scores = np.where(np.isfinite(test_set.targets), test_set.targets, 0.0)
        return scores, "debug-foresight", {}
    if s.score_mode == "random":
        rng = stage_rng(s.seed, "random-scores")
        return rng.standard_normal(len(test_set)), "debug-random", {}
    if s.score_mode != "model":
        raise ConfigError(f"unknown score mode {s.score_mode!r}; use model, foresight, or random")
    if s.model == "baseline":
        scores = momentum_vol_score(
            test_set.baseline[:, 0], test_set.baseline[:, 1], test_set.baseline[:, 2]
        )
        return np.where(np.isfinite(scores), scores, 0.0), "baseline", {}
    if s.checkpoint is None:
        raise ConfigError("backtest needs --checkpoint (or --model baseline, or a debug --score-mode)")
    model, meta = load_checkpoint(s.checkpoint)
    scores = predict_scores(model, test_set, workers=s.workers)
    return scores, meta["model"], {"checkpoint_fingerprint": meta["fingerprint"]}


def cmd_backtest(s: SimpleNamespace) -> int:
    test_set = dp.load_samples(Path(s.data) / "test.npz")
    scores, model_name, extra = _scores_for_backtest(s, test_set)
    fingerprint = config_fingerprint(
        {
            "command": "backtest",
            "model": model_name,
            "k": s.k,
            "n_boot": s.n_boot,
            "score_mode": s.score_mode,
            "seed": s.seed,
            **extra,
        }
    )
    report = bt.run_backtest(
        test_set, scores, k=s.k, model=model_name, seed=s.seed,
        config_fingerprint=fingerprint, n_boot=s.n_boot,
    )
    bt.write_report(report, s.out)
    print(
        f"model={model_name} sharpe={report.sharpe!r} "
        f"ci=[{report.ci_low!r}, {report.ci_high!r}] n_days={report.n_days} report={s.out}"
    )
    return 0


def _bench_kernels(n_qubits: int, repeats: int) -> list[str]:
    from . import qsim

    lines = []
    n_gates = 2000
    for backend in sorted(qsim.available_backends()):
        best = np.inf
        with qsim.use_backend(backend):
            for _ in range(repeats):
                state = qsim.zero_state(n_qubits)
                t0 = time.perf_counter()
                for g in range(n_gates):
                    wire = g % n_qubits
                    if g % 3 == 2 and n_qubits > 1:
                        qsim.apply_gate(state, qsim.GateOp("CNOT", (wire, (wire + 1) % n_qubits)))
                    elif g % 3 == 1:
                        qsim.apply_gate(state, qsim.GateOp("RZ", (wire,), 0.3))
                    else:
                        qsim.apply_gate(state, qsim.GateOp("RY", (wire,), 0.7))
                best = min(best, time.perf_counter() - t0)
        lines.append(f"backend={backend} n_qubits={n_qubits} gates_per_second={n_gates / best:.0f}")
    return lines


def _bench_training(s: SimpleNamespace) -> tuple[list[str], float, float]:
    rng = np.random.default_rng(s.seed)
    n, seq_len, n_feat = 2 * s.batch_size, 8, len(dp.FEATURE_NAMES)
    sequences = rng.normal(0.0, 1.0, (n, seq_len, n_feat))
    labels = (sequences[:, -1, :].sum(axis=1) > 0).astype(np.float64)
    samples = dp.SampleSet(
        split="train",
        seq_len=seq_len,
        feature_names=list(dp.FEATURE_NAMES),
        dates=np.array([f"2021-01-{2 + i % 20:02d}" for i in range(n)], dtype="U10"),
        codes=np.arange(n, dtype=np.int64),
        sequences=sequences,
        labels=labels,
    )
    lines, per_batch = [], {}
    n_batches = -(-n // s.batch_size)
    for kind in ("qtcnn", "mlp"):
        kwargs = dict(n_qubits=s.n_qubits, depth=s.depth) if kind == "qtcnn" else {}
        best = np.inf
        for _ in range(s.repeats):
            config = TrainConfig(model=kind, epochs=1, batch_size=s.batch_size, seed=s.seed, **kwargs)
            t0 = time.perf_counter()
            train(samples, config)
            best = min(best, time.perf_counter() - t0)
        per_batch[kind] = best / n_batches
        lines.append(f"model={kind} seconds_per_batch={per_batch[kind]:.6f} batch_size={s.batch_size}")
    return lines, per_batch["qtcnn"], per_batch["mlp"]


def cmd_bench(s: SimpleNamespace) -> int:
    lines = ["section=kernels"]
    lines += _bench_kernels(s.n_qubits, s.repeats)
    lines.append("section=training")
    training_lines, qtcnn_cost, mlp_cost = _bench_training(s)
    lines += training_lines
    lines.append(f"ratio_qtcnn_over_mlp={qtcnn_cost / mlp_cost:.3f}")
    text = "\n".join(lines) + "\n"
    Path(s.out).write_text(text, encoding="utf-8")
    print(text, end="")
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "prepare": cmd_prepare,
    "train": cmd_train,
    "backtest": cmd_backtest,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        settings = resolve_settings(args)
        return COMMANDS[args.command](settings)
    except ConfigError as exc:
        print(f"usage error: {args.command}: {exc}", file=sys.stderr)
        return 2
    except (DataError, DegenerateSeriesError, NotFittedError, OSError, ValueError) as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
