"""Compare the compiled state-vector kernels against the pure-Python
fallback across qubit counts, and report the per-batch training cost of the
hybrid model on each backend.

Run from the repository root:

    python benchmarks/compare_backends.py
    python benchmarks/compare_backends.py --qubits 4 8 12 --gates 3000
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qtcnn import qsim


def time_gate_stream(n_qubits: int, n_gates: int, repeats: int) -> float:
    """Best-of-repeats wall time for a fixed mixed gate stream."""
    best = np.inf
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
    return best


def time_training_batch(backend: str, repeats: int) -> float:
    """Seconds per training batch for a small hybrid model on one backend."""
    from qtcnn import datapipe as dp
    from qtcnn.models import TrainConfig, train

    rng = np.random.default_rng(0)
    n, seq_len, n_feat = 32, 8, len(dp.FEATURE_NAMES)
    sequences = rng.normal(0.0, 1.0, (n, seq_len, n_feat))
    samples = dp.SampleSet(
        split="train",
        seq_len=seq_len,
        feature_names=list(dp.FEATURE_NAMES),
        dates=np.array([f"2021-01-{2 + i % 20:02d}" for i in range(n)], dtype="U10"),
        codes=np.arange(n, dtype=np.int64),
        sequences=sequences,
        labels=(sequences[:, -1, :].sum(axis=1) > 0).astype(np.float64),
    )
    config = TrainConfig(model="qtcnn", n_qubits=8, depth=3, epochs=1, batch_size=16, seed=0)
    best = np.inf
    with qsim.use_backend(backend):
        for _ in range(repeats):
            t0 = time.perf_counter()
            train(samples, config)
            best = min(best, time.perf_counter() - t0)
    return best / 2  # two batches per epoch


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, nargs="+", default=[2, 4, 8, 12])
    parser.add_argument("--gates", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--skip-training", action="store_true")
    args = parser.parse_args()

    backends = sorted(qsim.available_backends())
    print(f"available backends: {', '.join(backends)} (active: {qsim.backend_name()})")
    print()
    header = f"{'qubits':>6}  " + "  ".join(f"{b + ' (gates/s)':>20}" for b in backends)
    if len(backends) > 1:
        header += f"  {'speedup':>8}"
    print(header)
    for n in args.qubits:
        rates = {}
        for backend in backends:
            with qsim.use_backend(backend):
                dt = time_gate_stream(n, args.gates, args.repeats)
            rates[backend] = args.gates / dt
        row = f"{n:>6}  " + "  ".join(f"{rates[b]:>20,.0f}" for b in backends)
        if len(backends) > 1:
            row += f"  {rates['compiled'] / rates['python']:>7.1f}x"
        print(row)

    if not args.skip_training:
        print()
        print("hybrid model training (n_qubits=8, depth=3, batch 16):")
        for backend in backends:
            dt = time_training_batch(backend, args.repeats)
            print(f"  {backend:>9}: {dt:.3f} s/batch")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
