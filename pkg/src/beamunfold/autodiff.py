"""Tape-based reverse-mode differentiation for complex matrix programs.

Values are numpy complex128 arrays of shape (m, n), optionally carrying a
leading batch axis (B, m, n).  Complex quantities are differentiated as pairs
of real components; an adjoint g is packed back into a complex array with
Re(g) = d(root)/d(Re v) and Im(g) = d(root)/d(Im v).  With this packing the
matmul chain rule takes the familiar form gX = G Y^H, gY = X^H G, and the
gradient of a real root with respect to real parameters is the ordinary one.

Hermitian-consuming primitives (PD inverse, log-det) symmetrize their input
as part of the forward pass, exactly like the eager kernels in linalg, and
their backward includes the matching adjoint symmetrization, so finite
differences of single real components agree with the tape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import POWER_BRANCH_SLACK, hermitianize


class AutodiffError(Exception):
    pass


class ShapeMismatch(AutodiffError):
    pass


class NotScalar(AutodiffError):
    pass


@dataclass(frozen=True)
class Var:
    tape: "Tape"
    idx: int

    @property
    def value(self) -> np.ndarray:
        return self.tape.values[self.idx]

    @property
    def shape(self):
        return self.tape.values[self.idx].shape


def _as_value(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim not in (2, 3):
        raise ShapeMismatch(f"values must be (m,n) or (B,m,n), got {a.shape}")
    return a


def _reduce_to(grad: np.ndarray, target_shape) -> np.ndarray:
    """Sum a broadcasted adjoint back down to the shape of its input."""
    if grad.ndim == 3 and len(target_shape) == 2:
        grad = grad.sum(axis=0)
    if grad.shape != tuple(target_shape):
        raise ShapeMismatch(f"adjoint shape {grad.shape} vs input {target_shape}")
    return grad


def _ht(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2).conj()


class Tape:
    """Append-only record of primitive operations with eager forward values."""

    def __init__(self):
        self.ops: list[str] = []
        self.inputs: list[tuple[int, ...]] = []
        self.values: list[np.ndarray] = []
        self.ctx: list = []
        self.param_names: dict[int, str] = {}

    # -- construction ------------------------------------------------------

    def _append(self, op: str, inputs: tuple[int, ...], value: np.ndarray, ctx=None) -> Var:
        self.ops.append(op)
        self.inputs.append(inputs)
        self.values.append(value)
        self.ctx.append(ctx)
        return Var(self, len(self.values) - 1)

    def leaf(self, value, param: bool = False, name: str | None = None) -> Var:
        v = self._append("leaf", (), _as_value(value))
        if param:
            self.param_names[v.idx] = name if name is not None else f"param{v.idx}"
        return v

    def add(self, x: Var, y: Var) -> Var:
        a, b = x.value, y.value
        if a.shape[-2:] != b.shape[-2:]:
            raise ShapeMismatch(f"add: {a.shape} vs {b.shape}")
        return self._append("add", (x.idx, y.idx), a + b)

    def scale(self, x: Var, c) -> Var:
        c = complex(c)
        return self._append("scale", (x.idx,), c * x.value, ctx=c)

    def sub(self, x: Var, y: Var) -> Var:
        return self.add(x, self.scale(y, -1.0))

    def matmul(self, x: Var, y: Var) -> Var:
        a, b = x.value, y.value
        if a.shape[-1] != b.shape[-2]:
            raise ShapeMismatch(f"matmul: {a.shape} @ {b.shape}")
        return self._append("matmul", (x.idx, y.idx), np.matmul(a, b))

    def conj_t(self, x: Var) -> Var:
        return self._append("conj_t", (x.idx,), _ht(x.value))

    def hpd_inverse(self, x: Var) -> Var:
        a = x.value
        if a.shape[-1] != a.shape[-2]:
            raise ShapeMismatch(f"hpd_inverse: non-square {a.shape}")
        m = hermitianize(a)
        np.linalg.cholesky(m)  # positive-definiteness gate
        inv = hermitianize(np.linalg.inv(m))
        return self._append("hpd_inverse", (x.idx,), inv)

    def logdet_hpd(self, x: Var) -> Var:
        a = x.value
        if a.shape[-1] != a.shape[-2]:
            raise ShapeMismatch(f"logdet_hpd: non-square {a.shape}")
        m = hermitianize(a)
        sign, ld = np.linalg.slogdet(m)
        if np.any(np.real(sign) <= 0):
            raise AutodiffError("logdet_hpd: matrix not positive definite")
        out = ld.reshape(ld.shape + (1, 1)).astype(np.complex128)
        return self._append("logdet_hpd", (x.idx,), out, ctx=m)

    def fro_norm_sq(self, x: Var) -> Var:
        a = x.value
        val = np.sum(np.abs(a) ** 2, axis=(-2, -1), keepdims=True).astype(np.complex128)
        return self._append("fro_norm_sq", (x.idx,), val)

    def real_part(self, x: Var) -> Var:
        return self._append("real_part", (x.idx,), x.value.real.astype(np.complex128))

    def complex_relu(self, x: Var) -> Var:
        a = x.value
        val = np.maximum(a.real, 0.0) + 1j * np.maximum(a.imag, 0.0)
        return self._append("complex_relu", (x.idx,), val)

    def flatten_col(self, x: Var) -> Var:
        a = x.value
        m, n = a.shape[-2:]
        val = a.reshape(a.shape[:-2] + (m * n, 1))
        return self._append("flatten_col", (x.idx,), val, ctx=(m, n))

    def vconcat(self, xs: list[Var]) -> Var:
        vals = [x.value for x in xs]
        ndims = {v.ndim for v in vals}
        cols = {v.shape[-1] for v in vals}
        if len(ndims) != 1 or len(cols) != 1:
            raise ShapeMismatch("vconcat: inputs must share batching and column count")
        val = np.concatenate(vals, axis=-2)
        rows = [v.shape[-2] for v in vals]
        return self._append("vconcat", tuple(x.idx for x in xs), val, ctx=rows)

    def mul_scalar(self, x: Var, s: Var) -> Var:
        a, c = x.value, s.value
        if c.shape[-2:] != (1, 1):
            raise ShapeMismatch(f"mul_scalar: scalar factor has shape {c.shape}")
        return self._append("mul_scalar", (x.idx, s.idx), a * c.real)

    def reciprocal(self, s: Var) -> Var:
        c = s.value
        if c.shape[-2:] != (1, 1):
            raise ShapeMismatch(f"reciprocal: expected scalar, got {c.shape}")
        return self._append("reciprocal", (s.idx,), (1.0 / c.real).astype(np.complex128))

    def softplus(self, s: Var) -> Var:
        c = s.value.real
        if c.shape[-2:] != (1, 1):
            raise ShapeMismatch(f"softplus: expected scalar, got {c.shape}")
        val = (np.maximum(c, 0.0) + np.log1p(np.exp(-np.abs(c)))).astype(np.complex128)
        return self._append("softplus", (s.idx,), val)

    def power_factor(self, s: Var, budget: float) -> Var:
        c = s.value.real
        if c.shape[-2:] != (1, 1):
            raise ShapeMismatch(f"power_factor: expected scalar, got {c.shape}")
        over = c > budget * (1.0 + POWER_BRANCH_SLACK)
        val = np.where(over, np.sqrt(budget / np.where(over, c, 1.0)), 1.0)
        return self._append("power_factor", (s.idx,), val.astype(np.complex128), ctx=float(budget))

    def batch_mean(self, s: Var) -> Var:
        c = s.value
        if c.ndim == 2:
            return self._append("batch_mean", (s.idx,), c.copy(), ctx=1)
        return self._append("batch_mean", (s.idx,), c.mean(axis=0), ctx=c.shape[0])

    _RECORD_DISPATCH = {
        "add": "add",
        "matmul": "matmul",
        "conj_t": "conj_t",
        "hpd_inverse": "hpd_inverse",
        "logdet_hpd": "logdet_hpd",
        "fro_norm_sq": "fro_norm_sq",
        "real_part": "real_part",
        "complex_relu": "complex_relu",
        "flatten_col": "flatten_col",
        "reciprocal": "reciprocal",
        "softplus": "softplus",
    }

    def record(self, op: str, inputs: list[Var]) -> Var:
        """Generic entry point: dispatch a primitive by name."""
        if op == "vconcat":
            return self.vconcat(list(inputs))
        if op not in self._RECORD_DISPATCH:
            raise AutodiffError(f"unknown primitive {op!r}")
        return getattr(self, self._RECORD_DISPATCH[op])(*inputs)

    # -- reverse sweep -----------------------------------------------------

    def backward(self, root: Var) -> dict[str, np.ndarray]:
        """Adjoints of every parameter leaf with respect to a real scalar root."""
        rv = root.value
        if rv.ndim != 2 or rv.shape != (1, 1):
            raise NotScalar(f"root must be an unbatched 1x1 node, got shape {rv.shape}")
        if abs(rv[0, 0].imag) > 1e-9 * max(1.0, abs(rv[0, 0].real)):
            raise NotScalar("root value is not real")

        adj: dict[int, np.ndarray] = {root.idx: np.ones((1, 1), dtype=np.complex128)}

        def acc(idx: int, g: np.ndarray):
            g = _reduce_to(g, self.values[idx].shape)
            if idx in adj:
                adj[idx] = adj[idx] + g
            else:
                adj[idx] = g

        for i in range(root.idx, -1, -1):
            if i not in adj:
                continue
            g = adj[i]
            op = self.ops[i]
            ins = self.inputs[i]
            if op == "leaf":
                continue
            elif op == "add":
                acc(ins[0], g)
                acc(ins[1], g)
            elif op == "scale":
                acc(ins[0], np.conj(self.ctx[i]) * g)
            elif op == "matmul":
                a, b = self.values[ins[0]], self.values[ins[1]]
                acc(ins[0], np.matmul(g, _ht(b)))
                acc(ins[1], np.matmul(_ht(a), g))
            elif op == "conj_t":
                acc(ins[0], _ht(g))
            elif op == "hpd_inverse":
                binv = self.values[i]
                gm = -np.matmul(np.matmul(_ht(binv), g), _ht(binv))
                acc(ins[0], hermitianize(gm))
            elif op == "logdet_hpd":
                m = self.ctx[i]
                gm = g.real * hermitianize(np.linalg.inv(m))
                acc(ins[0], gm)
            elif op == "fro_norm_sq":
                acc(ins[0], 2.0 * g.real * self.values[ins[0]])
            elif op == "real_part":
                acc(ins[0], g.real.astype(np.complex128))
            elif op == "complex_relu":
                a = self.values[ins[0]]
                gx = g.real * (a.real > 0) + 1j * (g.imag * (a.imag > 0))
                acc(ins[0], gx)
            elif op == "flatten_col":
                m, n = self.ctx[i]
                acc(ins[0], g.reshape(g.shape[:-2] + (m, n)))
            elif op == "vconcat":
                rows = self.ctx[i]
                off = 0
                for child, r in zip(ins, rows):
                    acc(child, g[..., off:off + r, :])
                    off += r
            elif op == "mul_scalar":
                a, c = self.values[ins[0]], self.values[ins[1]].real
                acc(ins[0], c * g)
                gs = np.sum((np.conj(g) * a).real, axis=(-2, -1), keepdims=True)
                acc(ins[1], gs.astype(np.complex128))
            elif op == "reciprocal":
                c = self.values[ins[0]].real
                acc(ins[0], (-g.real / (c * c)).astype(np.complex128))
            elif op == "softplus":
                c = self.values[ins[0]].real
                sig = 1.0 / (1.0 + np.exp(-c))
                acc(ins[0], (g.real * sig).astype(np.complex128))
            elif op == "power_factor":
                c = self.values[ins[0]].real
                budget = self.ctx[i]
                over = c > budget * (1.0 + POWER_BRANCH_SLACK)
                dfds = np.where(over, -0.5 * np.sqrt(budget) / np.where(over, c, 1.0) ** 1.5, 0.0)
                acc(ins[0], (g.real * dfds).astype(np.complex128))
            elif op == "batch_mean":
                n = self.ctx[i]
                src = self.values[ins[0]]
                gsrc = np.broadcast_to(g / n, src.shape) if src.ndim == 3 else g.copy()
                acc(ins[0], np.ascontiguousarray(gsrc))
            else:  # pragma: no cover
                raise AutodiffError(f"missing backward rule for {op!r}")

        grads: dict[str, np.ndarray] = {}
        for idx, name in self.param_names.items():
            grads[name] = adj.get(idx, np.zeros_like(self.values[idx]))
        return grads


def grad_check(build, params: dict[str, np.ndarray], step: float = 1e-5) -> float:
    """Worst relative disagreement between tape adjoints and central differences.

    ``build(tape, leaves)`` must record a real scalar root from the parameter
    leaves it is handed.  Every real component of every parameter is perturbed
    by +/- step and compared against the recorded adjoint.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    params = {k: _as_value(v) for k, v in params.items()}

    tape = Tape()
    leaves = {k: tape.leaf(v, param=True, name=k) for k, v in params.items()}
    grads = tape.backward(build(tape, leaves))

    def eval_with(modified: dict[str, np.ndarray]) -> float:
        t = Tape()
        lv = {k: t.leaf(v, param=True, name=k) for k, v in modified.items()}
        return float(build(t, lv).value[0, 0].real)

    worst = 0.0
    for name, base in params.items():
        g = grads[name]
        for idx in np.ndindex(base.shape):
            for comp in (1.0, 1j):
                hi = {k: v.copy() for k, v in params.items()}
                lo = {k: v.copy() for k, v in params.items()}
                hi[name][idx] += step * comp
                lo[name][idx] -= step * comp
                fd = (eval_with(hi) - eval_with(lo)) / (2.0 * step)
                ad = g[idx].real if comp == 1.0 else g[idx].imag
                scale = max(abs(ad), abs(fd))
                if scale < 1e-7:
                    continue
                worst = max(worst, abs(ad - fd) / scale)
    return worst
