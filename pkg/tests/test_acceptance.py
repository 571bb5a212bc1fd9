"""Acceptance gate: each shipped guarantee verified at its stated tolerance.

Every test prints exactly one `[PASS]`/`[FAIL]` line naming the criterion and
the measured values (run with `pytest -s` to stream them).  All randomness is
seeded, so the suite is deterministic end to end.
"""

import itertools
import time

import numpy as np
import pytest

from dense_oracle import circuit_unitary
from qtcnn import backtest as bt
from qtcnn import datapipe as dp
from qtcnn import qsim
from qtcnn.autodiff import Tape, bce_loss, param_shift_grad
from qtcnn.circuits import build_qconv_layout, effective_depth, kernel_gram
from qtcnn.cli import main as cli_main
from qtcnn.models import QTCNNModel, load_checkpoint


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _budget(name: str, elapsed: float, limit: float) -> None:
    assert elapsed < limit, f"{name}: took {elapsed:.1f}s, budget {limit:.0f}s"


def random_gate_circuit(rng: np.random.Generator, n_qubits: int, n_gates: int):
    """A random RY/RZ/CNOT sequence whose rotations read consecutive angles."""
    gates = []
    n_angles = 0
    for _ in range(n_gates):
        roll = rng.integers(3) if n_qubits > 1 else rng.integers(2)
        if roll == 2:
            control, target = rng.choice(n_qubits, 2, replace=False)
            gates.append(("CNOT", (int(control), int(target)), None))
        else:
            kind = "RY" if roll == 0 else "RZ"
            gates.append((kind, (int(rng.integers(n_qubits)),), n_angles))
            n_angles += 1

    def eval_fn(angles: np.ndarray) -> float:
        state = qsim.zero_state(n_qubits)
        for kind, wires, slot in gates:
            angle = None if slot is None else float(angles[slot])
            qsim.apply_gate(state, qsim.GateOp(kind, wires, angle))
        return qsim.expect_z(state, 0)

    return gates, eval_fn, n_angles


class TestCriterion1Simulator:
    def test_simulator_correctness(self):
        t0 = time.perf_counter()
        rng = np.random.default_rng(1)

        # norm preservation across 10^4 random gates
        state = qsim.zero_state(6)
        for _ in range(10_000):
            roll = rng.integers(3)
            if roll == 2:
                control, target = rng.choice(6, 2, replace=False)
                op = qsim.GateOp("CNOT", (int(control), int(target)))
            else:
                kind = "RY" if roll == 0 else "RZ"
                op = qsim.GateOp(kind, (int(rng.integers(6)),), float(rng.uniform(-np.pi, np.pi)))
            qsim.apply_gate(state, op)
        norm_drift = abs(state.norm() - 1.0)
        assert norm_drift <= 1e-10

        # agreement with a dense kron-matrix oracle on 1..3 qubits
        max_dense_err = 0.0
        for n_qubits in (1, 2, 3):
            for _ in range(10):
                gates, eval_fn, n_angles = random_gate_circuit(rng, n_qubits, 12)
                angles = rng.uniform(-np.pi, np.pi, n_angles)
                state = qsim.zero_state(n_qubits)
                oracle_gates = []
                for kind, wires, slot in gates:
                    angle = None if slot is None else float(angles[slot])
                    qsim.apply_gate(state, qsim.GateOp(kind, wires, angle))
                    oracle_gates.append((kind, wires, angle))
                unitary = circuit_unitary(n_qubits, oracle_gates)
                expected = unitary[:, 0]  # acting on |0..0>
                max_dense_err = max(max_dense_err, np.abs(state.amplitudes - expected).max())
        assert max_dense_err <= 1e-10

        # single-qubit fidelity against the closed form cos^2((a - b) / 2),
        # checked on a 100-point (10 x 10) angle grid
        grid = np.linspace(-np.pi, np.pi, 10)
        max_fid_err = 0.0
        for a in grid:
            for b in grid:
                got = qsim.fidelity(np.array([a]), np.array([b]))
                want = np.cos((a - b) / 2.0) ** 2
                max_fid_err = max(max_fid_err, abs(got - want))
        assert max_fid_err <= 1e-12

        elapsed = time.perf_counter() - t0
        _budget("criterion 1", elapsed, 10.0)
        _report(
            "criterion 1 (simulator correctness)",
            True,
            f"norm drift {norm_drift:.2e} <= 1e-10, dense-oracle err {max_dense_err:.2e} <= 1e-10, "
            f"fidelity err {max_fid_err:.2e} <= 1e-12, {elapsed:.1f}s < 10s",
        )


class TestCriterion2Gradients:
    def test_parameter_shift_and_end_to_end_gradients(self):
        t0 = time.perf_counter()
        rng = np.random.default_rng(2)

        # 50 random circuits: two-point shift rule vs central differences
        h = 1e-6
        max_shift_err = 0.0
        for _ in range(50):
            n_qubits = int(rng.integers(1, 5))
            _, eval_fn, n_angles = random_gate_circuit(rng, n_qubits, 12)
            if n_angles == 0:
                continue
            angles = rng.uniform(-np.pi, np.pi, n_angles)
            for index in range(n_angles):
                analytic = param_shift_grad(eval_fn, angles, index)
                up, down = angles.copy(), angles.copy()
                up[index] += h
                down[index] -= h
                fd = (eval_fn(up) - eval_fn(down)) / (2 * h)
                max_shift_err = max(max_shift_err, abs(analytic - fd))
        assert max_shift_err <= 1e-6

        # full hybrid model: loss gradient for every parameter tensor
        model = QTCNNModel(n_features=3, n_qubits=2, depth=1, rng=np.random.default_rng(3))
        seq = np.random.default_rng(4).normal(0.0, 1.0, (4, 3))
        label = np.array([1.0])

        def loss_value() -> float:
            return float(bce_loss(model.forward_sample(seq), label).values)

        loss = bce_loss(model.forward_sample(seq), label)
        Tape(loss).backward()
        max_rel_err = 0.0
        for name, p in model.named_parameters():
            flat = p.values.reshape(-1)
            grad = p.grad.reshape(-1)
            probe = np.unique(np.linspace(0, flat.size - 1, num=min(flat.size, 4), dtype=int))
            for i in probe:
                keep = flat[i]
                flat[i] = keep + h
                up = loss_value()
                flat[i] = keep - h
                down = loss_value()
                flat[i] = keep
                fd = (up - down) / (2 * h)
                rel = abs(grad[i] - fd) / (1.0 + abs(fd))
                max_rel_err = max(max_rel_err, rel)
        assert max_rel_err <= 1e-5

        elapsed = time.perf_counter() - t0
        _budget("criterion 2", elapsed, 60.0)
        _report(
            "criterion 2 (gradient exactness)",
            True,
            f"shift-vs-FD err {max_shift_err:.2e} <= 1e-6, hybrid rel err {max_rel_err:.2e} <= 1e-5, "
            f"{elapsed:.1f}s < 60s",
        )


class TestCriterion3Layouts:
    def test_layout_schedule_and_parameter_counts(self):
        shared = build_qconv_layout(8, 3, shared=True)
        unshared = build_qconv_layout(8, 3, shared=False)
        sizes = [len(w) for w in shared.kept_wires]
        ok = (
            shared.n_params == 18
            and unshared.n_params == 42
            and sizes == [8, 4, 2, 1]
            and effective_depth(5, 8) == 3
        )
        _report(
            "criterion 3 (circuit layouts)",
            ok,
            f"shared params {shared.n_params} == 18, unshared {unshared.n_params} == 42, "
            f"wire schedule {sizes} == [8, 4, 2, 1], effective_depth(5, 8) == {effective_depth(5, 8)}",
        )


class TestCriterion4KernelGram:
    def test_gram_matrices_are_valid_kernels(self):
        t0 = time.perf_counter()
        rng = np.random.default_rng(7)
        worst_sym, worst_diag, worst_eig = 0.0, 0.0, np.inf
        for _ in range(20):
            X = rng.uniform(0.0, np.pi, (10, 8))
            gram = kernel_gram(X)
            worst_sym = max(worst_sym, np.abs(gram - gram.T).max())
            worst_diag = max(worst_diag, np.abs(np.diag(gram) - 1.0).max())
            worst_eig = min(worst_eig, np.linalg.eigvalsh(gram).min())
        ok = worst_sym <= 1e-12 and worst_diag <= 1e-12 and worst_eig >= -1e-8
        elapsed = time.perf_counter() - t0
        _budget("criterion 4", elapsed, 10.0)
        _report(
            "criterion 4 (kernel Gram validity)",
            ok,
            f"asymmetry {worst_sym:.2e} <= 1e-12, diag err {worst_diag:.2e} <= 1e-12, "
            f"min eig {worst_eig:.2e} >= -1e-8, {elapsed:.1f}s < 10s",
        )


class TestCriterion5PipelineOracles:
    def test_small_instance_oracles(self):
        t0 = time.perf_counter()
        import pandas as pd

        def panel(closes, factors=None):
            dates = [d.strftime("%Y-%m-%d") for d in pd.bdate_range("2021-01-04", periods=len(closes))]
            return pd.DataFrame(
                {
                    "date": dates,
                    "code": 1,
                    "open": closes,
                    "high": closes,
                    "low": closes,
                    "close": closes,
                    "volume": 1000.0,
                    "factor": factors if factors is not None else [1.0] * len(closes),
                    "supervised": False,
                    "target": np.nan,
                }
            )

        checks = []

        adj = dp.adjust_close(panel([100.0, 100.0, 100.0], [1.0, 0.5, 1.0]))["adj_close"].to_numpy()
        checks.append(("adjust", np.abs(adj - [100.0, 50.0, 50.0]).max()))

        target = dp.compute_target(panel([100.0, 110.0, 121.0]))["target"].to_numpy()[0]
        checks.append(("target", abs(target - 0.1)))

        feats = dp.compute_features(dp.adjust_close(panel([100.0, 110.0])))
        checks.append(("ret1", abs(feats["ret1"].iloc[1] - 0.10)))

        frame = pd.DataFrame({"date": "2021-01-04", "code": range(5)})
        for name in dp.FEATURE_NAMES:
            frame[name] = 0.0
        frame["ret1"] = [1.0, 2.0, 3.0, 4.0, 100.0]
        normed, _ = dp.winsorize_zscore_daily(frame)
        expected = np.array([
            -0.5390543809273237, -0.5134359549030548, -0.48675009446110806,
            -0.46006423401916136, 1.999304664310648,
        ])
        checks.append(("winsorize", np.abs(normed["ret1"].to_numpy() - expected).max()))

        labels = dp.make_labels(
            pd.DataFrame({"date": "2021-01-04", "code": range(1, 7),
                          "target": [0.5, 0.4, 0.3, 0.2, 0.1, 0.0]}), p=2
        )
        got = dict(zip(labels["code"], labels["label"]))
        checks.append(("labels", 0.0 if got == {1: 1.0, 2: 1.0, 5: 0.0, 6: 0.0} else 1.0))

        dates23 = [f"2021-02-{d:02d}" for d in range(1, 24)]
        kept = dp.stride_sample(dates23, 11)
        checks.append(("stride", 0.0 if kept == [dates23[0], dates23[11], dates23[22]] else 1.0))

        mixed = [f"2020-03-{d:02d}" for d in range(1, 11)] + [f"2021-03-{d:02d}" for d in range(1, 6)]
        sampled = dp.year_fraction_sample(mixed, 0.5, seed=0)
        per_year = [sum(d.startswith("2020") for d in sampled), sum(d.startswith("2021") for d in sampled)]
        checks.append(("fraction", 0.0 if per_year == [5, 3] and sampled == sorted(sampled) else 1.0))

        dates10 = [f"2021-03-{d:02d}" for d in range(1, 11)]
        train_d, test_d = dp.temporal_split(dates10)
        checks.append(("split", 0.0 if (len(train_d), len(test_d)) == (8, 2) else 1.0))

        feat25 = pd.DataFrame({"date": [d.strftime("%Y-%m-%d") for d in
                                        pd.bdate_range("2021-01-04", periods=25)], "code": 1})
        rng = np.random.default_rng(0)
        for name in dp.FEATURE_NAMES:
            feat25[name] = rng.normal(0, 1, 25)
        rows = feat25[["date", "code"]].copy()
        rows["label"] = 1.0
        sset = dp.build_sequences(feat25, rows, seq_len=20)
        checks.append(("windows", 0.0 if len(sset) == 6 else 1.0))

        worst = max(err for _, err in checks)
        ok = worst <= 1e-9
        elapsed = time.perf_counter() - t0
        _budget("criterion 5", elapsed, 5.0)
        _report(
            "criterion 5 (pipeline oracles)",
            ok,
            f"{len(checks)} oracles, worst abs err {worst:.2e} <= 1e-9, {elapsed:.1f}s < 5s",
        )


class TestCriterion6Backtest:
    def test_backtest_invariants(self):
        t0 = time.perf_counter()

        sr = bt.sharpe_ratio(np.array([0.01, 0.02, 0.03]))
        frozen_err = abs(sr - 31.74901573277509)
        assert frozen_err <= 1e-3

        # anti-symmetry and affine invariance on 100 random days
        rng = np.random.default_rng(8)
        n_days, n_stocks = 100, 15
        dates = np.repeat([f"2021-{1 + d // 28:02d}-{1 + d % 28:02d}" for d in range(n_days)], n_stocks)
        codes = np.tile(np.arange(1, n_stocks + 1), n_days)
        scores = rng.normal(0, 1, n_days * n_stocks)
        targets = rng.normal(0, 0.02, n_days * n_stocks)
        tradable = np.ones(n_days * n_stocks, dtype=bool)
        _, plus = bt.long_short_returns(dates, codes, scores, targets, tradable, 4)
        _, minus = bt.long_short_returns(dates, codes, -scores, targets, tradable, 4)
        _, affine = bt.long_short_returns(dates, codes, 3.0 * scores - 7.0, targets, tradable, 4)
        anti_err = np.abs(plus + minus).max()
        affine_err = np.abs(plus - affine).max()
        assert len(plus) == n_days
        assert anti_err <= 1e-12 and affine_err == 0.0

        # perfect foresight equals the brute-force optimum on small days
        fore_err = 0.0
        for trial in range(5):
            n, k = 8, 2
            day_targets = rng.normal(0, 0.05, n)
            _, best = bt.long_short_returns(
                np.array(["2021-06-01"] * n), np.arange(n), day_targets,
                day_targets, np.ones(n, bool), k,
            )
            brute = max(
                day_targets[list(lp)].mean() - day_targets[list(sp)].mean()
                for lp in itertools.combinations(range(n), k)
                for sp in itertools.combinations([i for i in range(n) if i not in lp], k)
            )
            fore_err = max(fore_err, abs(best[0] - brute))
        assert fore_err <= 1e-12

        elapsed = time.perf_counter() - t0
        _budget("criterion 6", elapsed, 30.0)
        _report(
            "criterion 6 (backtest invariants)",
            True,
            f"frozen Sharpe err {frozen_err:.2e} <= 1e-3, antisymmetry {anti_err:.2e}, "
            f"affine invariance {affine_err:.2e}, foresight-vs-brute {fore_err:.2e}, {elapsed:.1f}s < 30s",
        )


@pytest.fixture(scope="module")
def criterion7(tmp_path_factory):
    """Full pipeline at the stated scale, used by criteria 7 and 8."""
    root = tmp_path_factory.mktemp("acceptance")
    t0 = time.perf_counter()

    def run(argv):
        assert cli_main([str(a) for a in argv]) == 0

    run(["synth", "--out", root / "panel.csv", "--stocks", 50, "--days", 300,
         "--rho", 0.5, "--seed", 7])
    run(["prepare", "--panel", root / "panel.csv", "--out-dir", root / "prep",
         "--p", 10, "--seq-len", 10, "--stride", 3, "--seed", 7])
    run(["train", "--data", root / "prep", "--model", "qtcnn", "--epochs", 10,
         "--seed", 7, "--out", root / "qtcnn.npz"])
    run(["backtest", "--data", root / "prep", "--checkpoint", root / "qtcnn.npz",
         "--k", 10, "--seed", 7, "--out", root / "qtcnn_report.txt"])
    run(["backtest", "--data", root / "prep", "--score-mode", "random",
         "--k", 10, "--seed", 7, "--out", root / "random_report.txt"])
    run(["backtest", "--data", root / "prep", "--model", "baseline",
         "--k", 10, "--seed", 7, "--out", root / "baseline_rho05.txt"])
    run(["synth", "--out", root / "panel0.csv", "--stocks", 50, "--days", 300,
         "--rho", 0.0, "--seed", 7])
    run(["prepare", "--panel", root / "panel0.csv", "--out-dir", root / "prep0",
         "--p", 10, "--seq-len", 10, "--stride", 3, "--seed", 7])
    run(["backtest", "--data", root / "prep0", "--model", "baseline",
         "--k", 10, "--seed", 7, "--out", root / "baseline_rho00.txt"])

    return {
        "root": root,
        "elapsed": time.perf_counter() - t0,
        "qtcnn": bt.read_report(root / "qtcnn_report.txt"),
        "random": bt.read_report(root / "random_report.txt"),
        "baseline_rho05": bt.read_report(root / "baseline_rho05.txt"),
        "baseline_rho00": bt.read_report(root / "baseline_rho00.txt"),
    }


class TestCriterion7EndToEnd:
    def test_out_of_sample_performance(self, criterion7):
        qtcnn_sr = criterion7["qtcnn"].sharpe
        random_sr = criterion7["random"].sharpe
        base05 = criterion7["baseline_rho05"].sharpe
        base00 = criterion7["baseline_rho00"].sharpe
        elapsed = criterion7["elapsed"]
        ok = qtcnn_sr > 0 and qtcnn_sr > random_sr and base05 > base00
        _budget("criterion 7", elapsed, 900.0)
        _report(
            "criterion 7 (end-to-end signal)",
            ok,
            f"qtcnn Sharpe {qtcnn_sr:.2f} > 0 and > random control {random_sr:.2f}; "
            f"momentum Sharpe rho=0.5 {base05:.2f} > rho=0 {base00:.2f}; {elapsed:.0f}s < 900s",
        )


class TestCriterion8Determinism:
    def test_full_rerun_is_byte_identical(self, criterion7, tmp_path):
        t0 = time.perf_counter()

        def run(argv):
            assert cli_main([str(a) for a in argv]) == 0

        run(["synth", "--out", tmp_path / "panel.csv", "--stocks", 50, "--days", 300,
             "--rho", 0.5, "--seed", 7])
        run(["prepare", "--panel", tmp_path / "panel.csv", "--out-dir", tmp_path / "prep",
             "--p", 10, "--seq-len", 10, "--stride", 3, "--seed", 7])
        run(["train", "--data", tmp_path / "prep", "--model", "qtcnn", "--epochs", 10,
             "--seed", 7, "--out", tmp_path / "qtcnn.npz"])
        run(["backtest", "--data", tmp_path / "prep", "--checkpoint", tmp_path / "qtcnn.npz",
             "--k", 10, "--seed", 7, "--out", tmp_path / "qtcnn_report.txt"])

        first = (criterion7["root"] / "qtcnn_report.txt").read_bytes()
        second = (tmp_path / "qtcnn_report.txt").read_bytes()
        ok = first == second
        elapsed = time.perf_counter() - t0
        _report(
            "criterion 8 (deterministic reruns)",
            ok,
            f"independent pipeline rerun reproduced the report byte-for-byte "
            f"({len(first)} bytes, {elapsed:.0f}s)",
        )


class TestCriterion9Bench:
    def test_quantum_costs_more_per_iteration(self, tmp_path):
        t0 = time.perf_counter()
        out = tmp_path / "bench.txt"
        assert cli_main(["bench", "--out", str(out), "--repeats", "1", "--seed", "0"]) == 0
        text = out.read_text()
        ratio = float(text.rsplit("ratio_qtcnn_over_mlp=", 1)[1])
        elapsed = time.perf_counter() - t0
        ok = ratio > 1.0
        _budget("criterion 9", elapsed, 300.0)
        _report(
            "criterion 9 (training cost comparison)",
            ok,
            f"qtcnn/mlp per-batch cost ratio {ratio:.2f} > 1, {elapsed:.0f}s < 300s",
        )
