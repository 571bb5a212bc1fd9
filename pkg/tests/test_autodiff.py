"""Autodiff tests: finite-difference checks for every primitive, shift-rule
exactness (including shared-parameter circuits), optimizer math, tape
determinism."""

import numpy as np
import pytest

from qtcnn import autodiff as ad
from qtcnn.autodiff import Tensor
from qtcnn.circuits import build_qconv_layout, eval_qconv, eval_qnn, AnsatzParams


def numeric_grad(f, arr, h=1e-6):
    """Central finite differences of scalar f() w.r.t. entries of arr,
    mutating arr in place between evaluations."""
    g = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        saved = arr[idx]
        arr[idx] = saved + h
        fp = f()
        arr[idx] = saved - h
        fm = f()
        arr[idx] = saved
        g[idx] = (fp - fm) / (2 * h)
        it.iternext()
    return g


def check_grads(build, leaves, atol=1e-7):
    """build() returns a scalar Tensor from the given leaf Tensors; compare
    backward grads against finite differences on each leaf."""
    out = build()
    assert out.values.shape == ()
    out.backward()
    for leaf in leaves:
        fd = numeric_grad(lambda: float(build().values), leaf.values)
        assert leaf.grad is not None
        np.testing.assert_allclose(leaf.grad, fd, atol=atol)


class TestPrimitives:
    def setup_method(self):
        self.rng = np.random.default_rng(42)

    def t(self, *shape):
        return Tensor(self.rng.normal(size=shape), requires_grad=True)

    def test_matmul_2d(self):
        a, b = self.t(3, 4), self.t(4, 2)
        w = self.rng.normal(size=(3, 2))

        def build():
            out = ad.matmul(a, b)
            return ad.bce_loss(ad.sigmoid(ad.reshape(out * 0.1, (6,))), (w.ravel() > 0)[:6].astype(float))

        check_grads(build, [a, b])

    def test_matmul_vec(self):
        a, b = self.t(4), self.t(4)
        build = lambda: ad.sigmoid(ad.matmul(a, b))
        check_grads(build, [a, b])

    def test_affine_batched(self):
        x, w, b = self.t(5, 3), self.t(3, 2), self.t(2)
        y = (self.rng.random((5, 2)) > 0.5).astype(float)
        build = lambda: ad.bce_loss(ad.sigmoid(ad.affine(x, w, b)), y)
        check_grads(build, [x, w, b])

    def test_affine_single(self):
        x, w, b = self.t(3), self.t(3, 2), self.t(2)
        y = np.array([1.0, 0.0])
        build = lambda: ad.bce_loss(ad.sigmoid(ad.affine(x, w, b)), y)
        check_grads(build, [x, w, b])

    def test_affine_shape_mismatch(self):
        with pytest.raises(ValueError):
            ad.affine(self.t(3), self.t(4, 2), self.t(2))

    def test_conv1d(self):
        x, w, b = self.t(6, 3), self.t(3, 3, 2), self.t(2)
        y = (self.rng.random((6, 2)) > 0.5).astype(float)
        build = lambda: ad.bce_loss(ad.sigmoid(ad.conv1d(x, w, b)), y)
        check_grads(build, [x, w, b])

    def test_conv1d_constant_signal_interior(self):
        # averaging kernel over a constant signal reproduces the constant away
        # from the zero-padded edges
        c = 0.7
        x = Tensor(np.full((5, 1), c))
        w = Tensor(np.full((3, 1, 1), 1.0 / 3.0))
        b = Tensor(np.zeros(1))
        out = ad.conv1d(x, w, b).values[:, 0]
        np.testing.assert_allclose(out[1:4], c, atol=1e-12)
        np.testing.assert_allclose(out[[0, 4]], 2 * c / 3, atol=1e-12)

    def test_relu_tanh_sigmoid(self):
        x = self.t(7)
        y = (self.rng.random(7) > 0.5).astype(float)
        for act in (ad.relu, ad.tanh, ad.sigmoid):
            x.zero_grad()
            build = lambda: ad.bce_loss(ad.sigmoid(act(x)), y)
            check_grads(build, [x])

    def test_global_avg_pool(self):
        x = self.t(5, 3)
        y = np.array([1.0, 0.0, 1.0])
        build = lambda: ad.bce_loss(ad.sigmoid(ad.global_avg_pool(x)), y)
        check_grads(build, [x])
        np.testing.assert_allclose(
            ad.global_avg_pool(x).values, x.values.mean(axis=0), atol=1e-15
        )

    def test_batchnorm_training_mode(self):
        x, gamma, beta = self.t(8, 3), self.t(3), self.t(3)
        y = (self.rng.random((8, 3)) > 0.5).astype(float)

        def build():
            state = ad.BatchNormState(3)
            return ad.bce_loss(ad.sigmoid(ad.batchnorm1d(x, gamma, beta, state, True)), y)

        check_grads(build, [x, gamma, beta], atol=1e-5)

    def test_batchnorm_eval_mode(self):
        x, gamma, beta = self.t(4, 2), self.t(2), self.t(2)
        y = np.zeros((4, 2))
        state = ad.BatchNormState(2)
        state.running_mean = np.array([0.5, -0.2])
        state.running_var = np.array([2.0, 0.7])

        def build():
            return ad.bce_loss(ad.sigmoid(ad.batchnorm1d(x, gamma, beta, state, False)), y)

        check_grads(build, [x, gamma, beta])

    def test_batchnorm_running_stats(self):
        state = ad.BatchNormState(2, momentum=0.1)
        x = Tensor(self.rng.normal(size=(16, 2)))
        ad.batchnorm1d(x, Tensor(np.ones(2)), Tensor(np.zeros(2)), state, True)
        expected_mean = 0.9 * 0.0 + 0.1 * x.values.mean(axis=0)
        expected_var = 0.9 * 1.0 + 0.1 * x.values.var(axis=0)
        np.testing.assert_allclose(state.running_mean, expected_mean, atol=1e-12)
        np.testing.assert_allclose(state.running_var, expected_var, atol=1e-12)

    def test_concat(self):
        a, b = self.t(2), self.t(3)
        y = (self.rng.random(5) > 0.5).astype(float)
        build = lambda: ad.bce_loss(ad.sigmoid(ad.concat([a, b])), y)
        check_grads(build, [a, b])

    def test_dropout_eval_is_identity(self):
        x = self.t(10)
        out = ad.dropout(x, 0.5, np.random.default_rng(0), training=False)
        assert out is x

    def test_dropout_train_grad(self):
        x = self.t(20)
        y = (self.rng.random(20) > 0.5).astype(float)

        def build():
            rng = np.random.default_rng(7)
            return ad.bce_loss(ad.sigmoid(ad.dropout(x, 0.3, rng, True)), y)

        check_grads(build, [x])

    def test_dropout_scaling(self):
        x = Tensor(np.ones(100000))
        out = ad.dropout(x, 0.1, np.random.default_rng(3), training=True)
        assert abs(out.values.mean() - 1.0) < 0.01
        kept = out.values[out.values > 0]
        np.testing.assert_allclose(kept, 1.0 / 0.9, atol=1e-12)


class TestBCE:
    def test_frozen_value(self):
        y_hat = Tensor(np.array([0.5, 0.5]))
        loss = ad.bce_loss(y_hat, np.array([1.0, 0.0]))
        assert abs(loss.values - np.log(2)) < 1e-12

    def test_clamp_keeps_loss_finite(self):
        y_hat = Tensor(np.array([0.0, 1.0]), requires_grad=True)
        loss = ad.bce_loss(y_hat, np.array([1.0, 0.0]))
        assert np.isfinite(loss.values)
        loss.backward()
        assert np.all(np.isfinite(y_hat.grad))
        # clamp active: gradient is exactly zero there
        np.testing.assert_array_equal(y_hat.grad, np.zeros(2))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            ad.bce_loss(Tensor(np.zeros(2)), np.zeros(3))


class TestParamShift:
    def test_analytic_ry(self):
        layout = build_qconv_layout(1, 0, shared=True)  # embedding only

        def f(angles):
            return eval_qconv(angles, layout, np.zeros(0))

        for theta in np.linspace(-np.pi, np.pi, 9):
            got = ad.param_shift_grad(f, np.array([theta]), 0)
            assert abs(got - (-np.sin(theta))) < 1e-12

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            ad.param_shift_grad(lambda a: 0.0, np.zeros(3), 3)

    def test_matches_fd_random_circuits(self):
        # distinct angle per gate, mixed RY/RZ/CNOT, random readout wire
        from qtcnn.qsim import GateOp, apply_gate, expect_z, zero_state

        rng = np.random.default_rng(31)
        for _ in range(20):
            n = int(rng.integers(1, 4))
            kinds = []
            for _ in range(8):
                k = rng.choice(["RY", "RZ", "CNOT"]) if n > 1 else rng.choice(["RY", "RZ"])
                if k == "CNOT":
                    c, t = rng.choice(n, 2, replace=False)
                    kinds.append(("CNOT", (int(c), int(t))))
                else:
                    kinds.append((k, (int(rng.integers(n)),)))
            n_angles = sum(1 for k, _ in kinds if k != "CNOT")
            angles0 = rng.uniform(-np.pi, np.pi, n_angles)
            readout = int(rng.integers(n))

            def f(angles):
                s = zero_state(n)
                ai = 0
                for k, wires in kinds:
                    if k == "CNOT":
                        apply_gate(s, GateOp(k, wires))
                    else:
                        apply_gate(s, GateOp(k, wires, angles[ai]))
                        ai += 1
                return expect_z(s, readout)

            for i in range(n_angles):
                ps = ad.param_shift_grad(f, angles0, i)
                fd = numeric_grad(lambda: f(angles0), angles0)[i]
                assert abs(ps - fd) < 1e-6


class TestQuantumNode:
    def test_qconv_shared_grads_match_fd(self):
        # sharing is the hard case: one trainable angle, many gate occurrences
        layout = build_qconv_layout(4, 2, shared=True)
        rng = np.random.default_rng(5)
        z = Tensor(rng.uniform(-np.pi, np.pi, 4), requires_grad=True)
        p = Tensor(rng.uniform(-0.5, 0.5, layout.n_params), requires_grad=True)
        circuit = ad.qconv_circuit(layout)

        out = ad.quantum_node(z, p, circuit)
        out.backward(np.ones(1))

        def f():
            return eval_qconv(z.values, layout, p.values)

        np.testing.assert_allclose(p.grad, numeric_grad(f, p.values), atol=1e-6)
        np.testing.assert_allclose(z.grad, numeric_grad(f, z.values), atol=1e-6)

    def test_qconv_unshared_grads_match_fd(self):
        layout = build_qconv_layout(4, 2, shared=False)
        rng = np.random.default_rng(6)
        z = Tensor(rng.uniform(-np.pi, np.pi, 4), requires_grad=True)
        p = Tensor(rng.uniform(-0.5, 0.5, layout.n_params), requires_grad=True)
        out = ad.quantum_node(z, p, ad.qconv_circuit(layout))
        out.backward(np.ones(1))
        f = lambda: eval_qconv(z.values, layout, p.values)
        np.testing.assert_allclose(p.grad, numeric_grad(f, p.values), atol=1e-6)
        np.testing.assert_allclose(z.grad, numeric_grad(f, z.values), atol=1e-6)

    def test_qnn_vector_output_grads(self):
        rng = np.random.default_rng(8)
        n, layers = 3, 2
        phi = Tensor(rng.uniform(0, np.pi, n), requires_grad=True)
        thetas = Tensor(rng.uniform(-0.5, 0.5, layers * n), requires_grad=True)
        weight = rng.normal(size=n)
        circuit = ad.qnn_circuit(n, layers)

        out = ad.quantum_node(phi, thetas, circuit)
        loss = ad.matmul(out, Tensor(weight))
        loss.backward()

        def f():
            vals = eval_qnn(phi.values, AnsatzParams(thetas.values.reshape(layers, n)))
            return float(weight @ vals)

        np.testing.assert_allclose(thetas.grad, numeric_grad(f, thetas.values), atol=1e-6)
        np.testing.assert_allclose(phi.grad, numeric_grad(f, phi.values), atol=1e-6)

    def test_constant_input_skips_input_shifts(self):
        layout = build_qconv_layout(2, 1, shared=True)
        z = Tensor(np.zeros(2))  # no grad required
        p = Tensor(np.zeros(6), requires_grad=True)
        out = ad.quantum_node(z, p, ad.qconv_circuit(layout))
        out.backward(np.ones(1))
        assert z.grad is None
        assert p.grad is not None

    def test_shape_validation(self):
        layout = build_qconv_layout(2, 1, shared=True)
        circuit = ad.qconv_circuit(layout)
        with pytest.raises(ValueError):
            ad.quantum_node(Tensor(np.zeros(3)), Tensor(np.zeros(6)), circuit)
        with pytest.raises(ValueError):
            ad.quantum_node(Tensor(np.zeros(2)), Tensor(np.zeros(5)), circuit)


class TestTape:
    def test_backward_deterministic(self):
        rng = np.random.default_rng(12)
        x = Tensor(rng.normal(size=(4, 3)), requires_grad=True)
        w = Tensor(rng.normal(size=(3, 2)), requires_grad=True)
        b = Tensor(rng.normal(size=2), requires_grad=True)
        y = (rng.random((4, 2)) > 0.5).astype(float)
        loss = ad.bce_loss(ad.sigmoid(ad.affine(x, w, b)), y)
        tape = ad.Tape(loss)

        tape.backward()
        first = [t.grad.copy() for t in (x, w, b)]
        tape.zero_grads()
        tape.backward()
        for before, t in zip(first, (x, w, b)):
            np.testing.assert_array_equal(before, t.grad)

    def test_grads_accumulate_across_tapes(self):
        w = Tensor(np.array([2.0]), requires_grad=True)
        for _ in range(3):
            out = ad.sigmoid(w * 1.0)
            out.backward(np.ones(1))
        single = ad.sigmoid(w * 1.0)
        g3 = w.grad.copy()
        w.zero_grad()
        single.backward(np.ones(1))
        np.testing.assert_allclose(g3, 3 * w.grad, atol=1e-15)

    def test_diamond_graph(self):
        # same tensor used twice: grads must sum over both paths
        x = Tensor(np.array([0.3]), requires_grad=True)
        out = (x * 2.0) + (x * x)
        out.backward(np.ones(1))
        np.testing.assert_allclose(x.grad, [2.0 + 2 * 0.3], atol=1e-12)


class TestOptim:
    def test_decay_factor_exact(self):
        p = np.array([1.0, -2.0])
        adamw_state: dict = {}
        ad.adamw_step([p], [np.zeros(2)], adamw_state, lr=0.1, weight_decay=0.1)
        np.testing.assert_allclose(p, np.array([1.0, -2.0]) * (1 - 0.1 * 0.1), atol=1e-15)

    def test_zero_grad_no_decay_fixed_point(self):
        p = np.array([1.5])
        ad.adamw_step([p], [np.zeros(1)], {}, lr=0.1, weight_decay=0.0)
        np.testing.assert_array_equal(p, [1.5])

    def test_descends_quadratic(self):
        w = Tensor(np.array([3.0]), requires_grad=True)
        opt = ad.AdamW([w], lr=0.1, weight_decay=0.0)
        for _ in range(200):
            opt.zero_grad()
            w.accumulate(2 * w.values)  # grad of w^2
            opt.step()
        assert abs(w.values[0]) < 0.05

    def test_first_step_magnitude(self):
        # bias correction makes the first step lr-sized regardless of grad scale
        for g0 in (1e-3, 1.0, 1e3):
            p = np.array([0.0])
            ad.adamw_step([p], [np.array([g0])], {}, lr=0.01, weight_decay=0.0)
            assert abs(abs(p[0]) - 0.01) < 1e-5

    def test_adam_class_has_no_decay(self):
        w = Tensor(np.array([1.0]), requires_grad=True)
        opt = ad.Adam([w], lr=0.1)
        opt.step()  # no grad: nothing should change
        np.testing.assert_array_equal(w.values, [1.0])

    def test_mismatched_lengths(self):
        with pytest.raises(ValueError):
            ad.adamw_step([np.zeros(2)], [], {})
