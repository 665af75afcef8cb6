import numpy as np
import pytest

from beamunfold.autodiff import NotScalar, ShapeMismatch, Tape, grad_check

from conftest import random_hermitian_psd


def _leaf(tape, arr, name=None):
    return tape.leaf(np.asarray(arr, dtype=complex), param=name is not None, name=name)


class TestRecord:
    def test_add_cancels(self):
        tape = Tape()
        a = _leaf(tape, [[1.0 + 2j, -3.0], [0.5j, 4.0]])
        out = tape.record("add", [a, tape.scale(a, -1.0)])
        assert np.all(out.value == 0)

    def test_matmul_identity(self):
        tape = Tape()
        eye = _leaf(tape, np.eye(2))
        b = _leaf(tape, [[1.0, 2.0], [3.0, 4.0]])
        out = tape.record("matmul", [eye, b])
        assert np.allclose(out.value, b.value)

    def test_real_part_scalar(self):
        tape = Tape()
        z = _leaf(tape, [[3.0 + 4.0j]])
        out = tape.record("real_part", [z])
        assert out.value[0, 0] == 3.0

    def test_shape_mismatch(self):
        tape = Tape()
        a = _leaf(tape, np.ones((2, 2)))
        b = _leaf(tape, np.ones((3, 3)))
        with pytest.raises(ShapeMismatch):
            tape.matmul(a, b)


class TestBackwardBasics:
    def test_norm_sq_gradient_pairs(self):
        # d||x||^2 / d(re, im) = (2 re, 2 im)
        tape = Tape()
        x = _leaf(tape, [[1.0 + 1.0j]], name="x")
        root = tape.real_part(tape.fro_norm_sq(x))
        g = tape.backward(root)["x"]
        assert g[0, 0].real == pytest.approx(2.0)
        assert g[0, 0].imag == pytest.approx(2.0)

    def test_logdet_gradient_is_inverse(self):
        tape = Tape()
        a = _leaf(tape, np.diag([2.0, 4.0]), name="A")
        root = tape.real_part(tape.logdet_hpd(a))
        g = tape.backward(root)["A"]
        assert np.allclose(g, np.diag([0.5, 0.25]), atol=1e-12)

    def test_root_must_be_scalar(self):
        tape = Tape()
        a = _leaf(tape, np.eye(2), name="A")
        with pytest.raises(NotScalar):
            tape.backward(a)

    def test_root_must_be_real(self):
        tape = Tape()
        a = _leaf(tape, [[1.0 + 1.0j]], name="A")
        with pytest.raises(NotScalar):
            tape.backward(a)

    def test_unused_param_gets_zero_adjoint(self):
        tape = Tape()
        x = _leaf(tape, [[2.0]], name="x")
        unused = _leaf(tape, np.ones((2, 2)), name="unused")
        root = tape.real_part(tape.fro_norm_sq(x))
        grads = tape.backward(root)
        assert np.all(grads["unused"] == 0)

    def test_relu_sign_mask(self):
        tape = Tape()
        x = _leaf(tape, [[0.5 - 0.5j, -0.5 + 0.5j]], name="x")
        root = tape.real_part(tape.fro_norm_sq(tape.complex_relu(x)))
        g = tape.backward(root)["x"]
        # entry 0: re>0 passes, im<0 blocked; entry 1: re<0 blocked, im>0 passes
        assert g[0, 0] == pytest.approx(1.0 + 0.0j)
        assert g[0, 1] == pytest.approx(0.0 + 1.0j)

    def test_determinism(self):
        def run():
            tape = Tape()
            x = _leaf(tape, [[1.0 + 2.0j], [3.0 - 1.0j]], name="x")
            w = _leaf(tape, [[0.3 - 0.2j, 1.1 + 0.5j]], name="w")
            root = tape.real_part(tape.fro_norm_sq(tape.complex_relu(tape.matmul(w, x))))
            return tape.backward(root)

        g1, g2 = run(), run()
        assert np.array_equal(g1["x"], g2["x"])
        assert np.array_equal(g1["w"], g2["w"])


class TestGradCheckOracle:
    def test_quadratic_scalar(self):
        def build(tape, lv):
            return tape.real_part(tape.matmul(lv["x"], lv["x"]))

        err = grad_check(build, {"x": np.array([[1.5]])}, step=1e-5)
        assert err <= 1e-9

    def test_relu_composed_with_norm(self):
        def build(tape, lv):
            return tape.real_part(tape.fro_norm_sq(tape.complex_relu(lv["x"])))

        x = np.array([[0.5 - 0.7j, -0.3 + 0.4j], [1.2 + 0.2j, -0.8 - 0.9j]])
        assert grad_check(build, {"x": x}, step=1e-6) <= 1e-6

    @pytest.mark.parametrize("n", [2, 4])
    def test_inverse_and_logdet(self, n, rng):
        a = random_hermitian_psd(rng, n) + 0.5 * np.eye(n)

        def build_inv(tape, lv):
            probe = tape.leaf(np.arange(1, n * n + 1, dtype=float).reshape(n, n) / n)
            return tape.real_part(
                tape.fro_norm_sq(tape.matmul(tape.hpd_inverse(lv["A"]), probe)))

        def build_logdet(tape, lv):
            return tape.real_part(tape.logdet_hpd(lv["A"]))

        assert grad_check(build_inv, {"A": a}, step=1e-6) <= 1e-5
        assert grad_check(build_logdet, {"A": a}, step=1e-6) <= 1e-5

    def test_scalar_chain(self):
        def build(tape, lv):
            lam = tape.add(tape.softplus(tape.real_part(lv["r"])),
                           tape.leaf(np.full((1, 1), 1e-6)))
            scaled = tape.mul_scalar(lv["M"], tape.reciprocal(lam))
            return tape.real_part(tape.fro_norm_sq(scaled))

        params = {"r": np.array([[0.37]]), "M": np.array([[1.0 + 1.0j, -0.5]])}
        assert grad_check(build, params, step=1e-6) <= 1e-6

    def test_power_factor_branches(self):
        def build_over(tape, lv):
            s = tape.fro_norm_sq(lv["V"])
            return tape.real_part(
                tape.fro_norm_sq(tape.mul_scalar(lv["V"], tape.power_factor(s, 1.0))))

        # infeasible side: scale factor active and differentiated through
        v_over = np.array([[1.0 + 1.0j, 2.0]])
        assert grad_check(build_over, {"V": v_over}, step=1e-6) <= 1e-6
        # feasible side: factor pinned at one, gradient reduces to identity path
        v_under = np.array([[0.1 + 0.1j, 0.2]])
        assert grad_check(build_over, {"V": v_under}, step=1e-6) <= 1e-6


class TestLinearity:
    def test_backward_is_linear(self):
        x0 = np.array([[0.7 - 0.3j], [1.1 + 0.9j]])
        w0 = np.array([[0.5 + 0.1j, -0.4 + 0.8j]])

        def grads_for(alpha, beta):
            tape = Tape()
            x = _leaf(tape, x0, name="x")
            w = _leaf(tape, w0, name="w")
            f = tape.fro_norm_sq(tape.matmul(w, x))
            g = tape.logdet_hpd(tape.add(tape.leaf(np.eye(1)), tape.fro_norm_sq(x)))
            root = tape.real_part(tape.add(tape.scale(f, alpha), tape.scale(g, beta)))
            return tape.backward(root)

        ga = grads_for(1.0, 0.0)
        gb = grads_for(0.0, 1.0)
        gmix = grads_for(0.6, -1.7)
        for key in ("x", "w"):
            combo = 0.6 * ga[key] - 1.7 * gb[key]
            assert np.max(np.abs(gmix[key] - combo)) <= 1e-10


class TestBatched:
    def test_batch_mean_gradient(self):
        # mean over batch of ||c * x_b||^2 with shared scalar-free chain
        xb = np.stack([np.array([[1.0 + 0.5j]]), np.array([[2.0 - 1.0j]]),
                       np.array([[0.3]])])
        tape = Tape()
        w = _leaf(tape, [[2.0]], name="w")
        x = tape.leaf(xb)
        root = tape.real_part(tape.batch_mean(tape.fro_norm_sq(tape.matmul(w, x))))
        g = tape.backward(root)["w"]
        expect = np.mean([2 * 2.0 * abs(v) ** 2 for v in xb[:, 0, 0]])
        assert g[0, 0].real == pytest.approx(expect, rel=1e-12)

    def test_shared_param_reduces_over_batch(self):
        def build(tape, lv):
            xb = tape.leaf(np.stack([np.eye(2), 2 * np.eye(2)]).astype(complex))
            return tape.real_part(tape.batch_mean(
                tape.fro_norm_sq(tape.matmul(lv["w"], xb))))

        w = np.array([[0.5 + 0.2j, -0.1], [0.3, 0.9 - 0.4j]])
        assert grad_check(build, {"w": w}, step=1e-6) <= 1e-6
