"""Unfolded stepsize network and its hybrid two-stage training.

The network runs T layers of the matrix-inverse-free ascent step, but the
per-cell spectral stepsize is replaced by a small complex MLP per layer that
maps each user's current beamformer and ascent direction to a positive
scalar.  Stage 1 regresses the unrolled output onto converged solver labels;
stage 2 fine-tunes directly on the negated weighted sum rate.

Inference is plain numpy (shared with the solver via fastfp_layer); training
records the whole unrolled computation on an autodiff tape with a leading
minibatch axis.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import objective as obj
from .autodiff import Tape, Var
from .channel import ChannelSet, NetworkConfig
from .solvers import eigen_stepsizes, fastfp_layer, fastfp_solve, initial_beamformers

STEPSIZE_EPS = 1e-6
_MODEL_MAGIC = b"BUNM"
_MODEL_VERSION = 1


class DeepFPError(Exception):
    pass


class EmptyDataset(DeepFPError):
    pass


class DivergedTraining(DeepFPError):
    pass


class WidthMismatch(DeepFPError):
    pass


def complex_relu(x):
    """Elementwise max(Re, 0) + i max(Im, 0)."""
    x = np.asarray(x, dtype=np.complex128)
    out = np.maximum(x.real, 0.0) + 1j * np.maximum(x.imag, 0.0)
    return out if out.shape else complex(out)


def softplus(x: float) -> float:
    return float(np.maximum(x, 0.0) + np.log1p(np.exp(-abs(x))))


@dataclass
class LayerMLP:
    """One per-layer predictor: complex weights, hidden complex-ReLU, real output."""

    weights: list[np.ndarray]   # [ (U, in), (U, U) x (M_hid - 1), (1, U) ]
    biases: list[np.ndarray]    # column vectors matching each weight's rows


@dataclass
class StepsizeNet:
    T: int
    Nt: int
    d: int
    hidden_layers: int
    hidden_units: int
    layers: list[LayerMLP]

    @property
    def input_width(self) -> int:
        return 2 * self.Nt * self.d

    def param_items(self):
        """Deterministic (name, array) walk over every parameter."""
        for tau, layer in enumerate(self.layers):
            for j, (w, b) in enumerate(zip(layer.weights, layer.biases)):
                yield f"t{tau}_W{j}", w
                yield f"t{tau}_b{j}", b

    def copy(self) -> "StepsizeNet":
        return StepsizeNet(
            T=self.T, Nt=self.Nt, d=self.d,
            hidden_layers=self.hidden_layers, hidden_units=self.hidden_units,
            layers=[LayerMLP([w.copy() for w in l.weights],
                             [b.copy() for b in l.biases]) for l in self.layers],
        )

    # numpy inference path -------------------------------------------------

    def stepsizes(self, tau: int, V: np.ndarray, Lambda: np.ndarray,
                  gram: np.ndarray, direction: np.ndarray) -> np.ndarray:
        L, K = V.shape[0], V.shape[1]
        width = self.input_width
        x = np.concatenate(
            [V.reshape(L, K, width // 2, 1), direction.reshape(L, K, width // 2, 1)],
            axis=2)
        raw = _mlp_raw(self.layers[tau], x)
        sp = np.maximum(raw, 0.0) + np.log1p(np.exp(-np.abs(raw)))
        return sp + STEPSIZE_EPS


def _mlp_raw(layer: LayerMLP, x: np.ndarray) -> np.ndarray:
    """MLP forward on stacked inputs (..., input_width, 1) -> real (...)."""
    z = x
    for w, b in zip(layer.weights[:-1], layer.biases[:-1]):
        z = complex_relu(w @ z + b)
    out = layer.weights[-1] @ z + layer.biases[-1]
    return np.asarray(out.real)[..., 0, 0]


class EigenStub:
    """Predictor stub: per-cell dominant eigenvalue broadcast to every user."""

    def __init__(self, T: int):
        self.T = T

    def stepsizes(self, tau, V, Lambda, gram, direction):
        K = V.shape[1]
        return np.repeat(eigen_stepsizes(gram)[:, None], K, axis=1)


def init_stepsize_net(T: int, Nt: int, d: int, hidden_layers: int = 2,
                      hidden_units: int = 16, seed: int = 0) -> StepsizeNet:
    """Zero-mean complex init with per-component variance 1/fan_in; zero biases."""
    if T < 0:
        raise ValueError("layer count must be nonnegative")
    rng = np.random.default_rng([seed, 0xDF9])
    width = 2 * Nt * d
    dims = [width] + [hidden_units] * hidden_layers + [1]
    layers = []
    for _ in range(T):
        ws, bs = [], []
        for fan_in, fan_out in zip(dims, dims[1:]):
            std = 1.0 / np.sqrt(fan_in)
            w = std * (rng.standard_normal((fan_out, fan_in))
                       + 1j * rng.standard_normal((fan_out, fan_in)))
            ws.append(w)
            bs.append(np.zeros((fan_out, 1), dtype=np.complex128))
        layers.append(LayerMLP(ws, bs))
    return StepsizeNet(T=T, Nt=Nt, d=d, hidden_layers=hidden_layers,
                       hidden_units=hidden_units, layers=layers)


def predict_stepsize(net: StepsizeNet, tau: int, V_lk: np.ndarray,
                     direction: np.ndarray) -> float:
    """Single-user stepsize: MLP output through softplus(.) + eps, always > 0."""
    width = net.input_width
    if V_lk.size != width // 2 or direction.size != width // 2:
        raise WidthMismatch(
            f"predictor expects {width // 2} entries per matrix, got "
            f"{V_lk.size} and {direction.size}")
    x = np.concatenate([np.asarray(V_lk, np.complex128).reshape(-1, 1),
                        np.asarray(direction, np.complex128).reshape(-1, 1)], axis=0)
    raw = float(_mlp_raw(net.layers[tau], x))
    return softplus(raw) + STEPSIZE_EPS


@dataclass
class UnfoldTrace:
    wsr_nats: list[float] = field(default_factory=list)        # after each layer
    stepsizes: list[np.ndarray] = field(default_factory=list)  # (L, K) per layer
    eigen_stepsizes: list[np.ndarray] = field(default_factory=list)


def unfold_forward(net, channels, V0: np.ndarray, config: NetworkConfig,
                   collect_eigen: bool = False):
    """Run the T-layer unfolded network; returns (V_T, UnfoldTrace).

    ``net`` is a StepsizeNet or any object exposing T and stepsizes(...).
    """
    H = obj._h_tensor(channels)
    weights = config.weights
    sigma2 = config.noise_power
    power = np.asarray(config.power, dtype=float)
    V = np.array(V0, dtype=np.complex128)
    trace = UnfoldTrace()
    for tau in range(net.T):
        def stepsize_fn(V_cur, Lambda, gram, direction, _tau=tau):
            return net.stepsizes(_tau, V_cur, Lambda, gram, direction)

        V, aux, lam_lk = fastfp_layer(H, V, weights, power, sigma2, stepsize_fn)
        trace.wsr_nats.append(obj.wsr_fast(H, V, weights, sigma2))
        trace.stepsizes.append(lam_lk)
        if collect_eigen:
            trace.eigen_stepsizes.append(eigen_stepsizes(aux.gram))
    return V, trace


def loss_supervised(V_T: np.ndarray, V_star: np.ndarray) -> float:
    """Mean per-user squared deviation from the solver labels."""
    if V_T.shape != V_star.shape:
        raise DeepFPError(f"shape mismatch {V_T.shape} vs {V_star.shape}")
    L, K = V_T.shape[0], V_T.shape[1]
    return float(np.sum(np.abs(V_T - V_star) ** 2) / (L * K))


def loss_unsupervised(channels, V_T: np.ndarray, weights: np.ndarray,
                      sigma2: float) -> float:
    """Negated per-user-average weighted sum rate in nats."""
    H = obj._h_tensor(channels)
    L, K = V_T.shape[0], V_T.shape[1]
    return -obj.wsr_fast(H, V_T, weights, sigma2) / (L * K)


# -- tape construction ---------------------------------------------------------


def _record_mlp(tape: Tape, leaves: dict[str, Var], tau: int, n_weights: int,
                x: Var) -> Var:
    """Record one predictor forward; returns the positive stepsize node."""
    z = x
    for j in range(n_weights):
        z = tape.add(tape.matmul(leaves[f"t{tau}_W{j}"], z), leaves[f"t{tau}_b{j}"])
        if j < n_weights - 1:
            z = tape.complex_relu(z)
    raw = tape.real_part(z)
    eps = tape.leaf(np.full((1, 1), STEPSIZE_EPS, dtype=np.complex128))
    return tape.add(tape.softplus(raw), eps)


def _record_covariances(tape: Tape, Hc, Vv, config: NetworkConfig):
    """Record D, F, own-signal products for every user at the current V nodes."""
    L, K, Nr = config.L, config.K, config.Nr
    sigma2 = config.noise_power
    eye_r = tape.leaf(sigma2 * np.eye(Nr, dtype=np.complex128))
    own, Dm, Fm = {}, {}, {}
    prods = {}
    for l in range(L):
        for k in range(K):
            for i in range(L):
                for j in range(K):
                    prods[(l, k, i, j)] = tape.matmul(Hc[(l, k, i)], Vv[(i, j)])
    for l in range(L):
        for k in range(K):
            acc = eye_r
            for i in range(L):
                for j in range(K):
                    g = prods[(l, k, i, j)]
                    acc = tape.add(acc, tape.matmul(g, tape.conj_t(g)))
            o = prods[(l, k, l, k)]
            own[(l, k)] = o
            Dm[(l, k)] = acc
            Fm[(l, k)] = tape.sub(acc, tape.matmul(o, tape.conj_t(o)))
    return Dm, Fm, own


def record_unrolled_loss(tape: Tape, net: StepsizeNet, leaves: dict[str, Var],
                         H_batch: np.ndarray, V0_batch: np.ndarray,
                         config: NetworkConfig, labels: np.ndarray | None):
    """Record the T-layer unroll and the batch-mean loss as the root node.

    With ``labels`` given the root is the supervised deviation loss; otherwise
    it is the negated average weighted sum rate of the final beamformers.
    H_batch is (B, L, K, L, Nr, Nt); V0_batch is (B, L, K, Nt, d).
    """
    L, K, d = config.L, config.K, config.d
    weights = config.weights
    n_weights = net.hidden_layers + 1
    eye_d = tape.leaf(np.eye(d, dtype=np.complex128))

    Hc = {
        (l, k, i): tape.leaf(np.ascontiguousarray(H_batch[:, l, k, i]))
        for l in range(L) for k in range(K) for i in range(L)
    }
    Vv = {
        (l, k): tape.leaf(np.ascontiguousarray(V0_batch[:, l, k]))
        for l in range(L) for k in range(K)
    }

    for tau in range(net.T):
        Dm, Fm, own = _record_covariances(tape, Hc, Vv, config)
        Yv, igv = {}, {}
        for l in range(L):
            for k in range(K):
                Yv[(l, k)] = tape.matmul(tape.hpd_inverse(Dm[(l, k)]), own[(l, k)])
                G = tape.matmul(tape.matmul(tape.conj_t(own[(l, k)]),
                                            tape.hpd_inverse(Fm[(l, k)])), own[(l, k)])
                gamma = tape.scale(tape.add(G, tape.conj_t(G)), 0.5)
                igv[(l, k)] = tape.add(eye_d, gamma)
        lam_mat = {
            (l, k): tape.scale(
                tape.matmul(tape.matmul(tape.conj_t(Hc[(l, k, l)]), Yv[(l, k)]),
                            igv[(l, k)]),
                float(weights[l, k]))
            for l in range(L) for k in range(K)
        }
        Mv = {
            (i, j): tape.matmul(tape.matmul(Yv[(i, j)], igv[(i, j)]),
                                tape.conj_t(Yv[(i, j)]))
            for i in range(L) for j in range(K)
        }
        gram = {}
        for cell in range(L):
            acc = None
            for i in range(L):
                for j in range(K):
                    contrib = tape.scale(
                        tape.matmul(tape.matmul(tape.conj_t(Hc[(i, j, cell)]),
                                                Mv[(i, j)]), Hc[(i, j, cell)]),
                        float(weights[i, j]))
                    acc = contrib if acc is None else tape.add(acc, contrib)
            gram[cell] = tape.scale(tape.add(acc, tape.conj_t(acc)), 0.5)

        V_hat = {}
        for l in range(L):
            for k in range(K):
                direction = tape.sub(lam_mat[(l, k)], tape.matmul(gram[l], Vv[(l, k)]))
                x = tape.vconcat([tape.flatten_col(Vv[(l, k)]),
                                  tape.flatten_col(direction)])
                lam = _record_mlp(tape, leaves, tau, n_weights, x)
                step = tape.mul_scalar(direction, tape.reciprocal(lam))
                V_hat[(l, k)] = tape.add(Vv[(l, k)], step)
        for l in range(L):
            s = None
            for k in range(K):
                term = tape.fro_norm_sq(V_hat[(l, k)])
                s = term if s is None else tape.add(s, term)
            fac = tape.power_factor(s, float(config.power[l]))
            for k in range(K):
                Vv[(l, k)] = tape.mul_scalar(V_hat[(l, k)], fac)

    if labels is not None:
        total = None
        for l in range(L):
            for k in range(K):
                diff = tape.sub(Vv[(l, k)], tape.leaf(np.ascontiguousarray(labels[:, l, k])))
                term = tape.fro_norm_sq(diff)
                total = term if total is None else tape.add(total, term)
        root = tape.batch_mean(tape.scale(total, 1.0 / (L * K)))
    else:
        Dm, Fm, own = _record_covariances(tape, Hc, Vv, config)
        total = None
        for l in range(L):
            for k in range(K):
                M = tape.matmul(tape.matmul(tape.conj_t(own[(l, k)]),
                                            tape.hpd_inverse(Fm[(l, k)])), own[(l, k)])
                rate = tape.logdet_hpd(tape.add(eye_d, M))
                term = tape.scale(rate, float(weights[l, k]))
                total = term if total is None else tape.add(total, term)
        root = tape.batch_mean(tape.scale(total, -1.0 / (L * K)))
    return tape.real_part(root), Vv


def batch_loss_and_grads(net: StepsizeNet, H_batch: np.ndarray,
                         V0_batch: np.ndarray, config: NetworkConfig,
                         labels: np.ndarray | None):
    """(loss value, gradient dict) for one minibatch."""
    tape = Tape()
    leaves = {name: tape.leaf(value, param=True, name=name)
              for name, value in net.param_items()}
    root, _ = record_unrolled_loss(tape, net, leaves, H_batch, V0_batch, config, labels)
    grads = tape.backward(root)
    return float(root.value[0, 0].real), grads


# -- optimizer and training loop -----------------------------------------------

@dataclass
class TrainConfig:
    batch_size: int = 200
    initial_lr: float = 0.005
    lr_halving_epochs: int = 20
    epochs_stage1: int = 60
    epochs_stage2: int = 40
    label_solver_iters: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.initial_lr <= 0:
            raise ValueError("initial_lr must be positive")


class Adam:
    """Adaptive-moment optimizer over the real components of complex params."""

    def __init__(self, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
             lr: float) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for name, p in params.items():
            g = grads[name]
            g2 = g.real ** 2 + 1j * g.imag ** 2
            if name not in self.m:
                self.m[name] = np.zeros_like(p)
                self.v[name] = np.zeros_like(p)
            self.m[name] = b1 * self.m[name] + (1 - b1) * g
            self.v[name] = b2 * self.v[name] + (1 - b2) * g2
            mh = self.m[name] / (1 - b1 ** self.t)
            vh = self.v[name] / (1 - b2 ** self.t)
            upd_re = mh.real / (np.sqrt(vh.real) + self.eps)
            upd_im = mh.imag / (np.sqrt(vh.imag) + self.eps)
            p -= lr * (upd_re + 1j * upd_im)


@dataclass
class TrainState:
    """Everything needed to continue an interrupted run bit-identically."""

    next_epoch: int = 0
    adam: Adam = field(default_factory=Adam)
    best_val_nats: float = -np.inf
    best_params: dict | None = None


def sample_initial_V(config: NetworkConfig, sample: ChannelSet) -> np.ndarray:
    """Starting beamformers pinned to the sample so labels and unrolls align."""
    return initial_beamformers(config, sample.seed)


def compute_labels(config: NetworkConfig, samples: list[ChannelSet],
                   iters: int) -> np.ndarray:
    """Solver outputs after a fixed iteration budget, from each sample's own V0."""
    out = np.zeros((len(samples), config.L, config.K, config.Nt, config.d),
                   dtype=np.complex128)
    for n, s in enumerate(samples):
        V0 = sample_initial_V(config, s)
        tr = fastfp_solve(s, config, V0, max_iters=iters, tol=0.0)
        out[n] = tr.final_V
    return out


def _validation_wsr(net: StepsizeNet, config: NetworkConfig,
                    samples: list[ChannelSet]) -> float:
    vals = []
    for s in samples:
        V0 = sample_initial_V(config, s)
        V, _ = unfold_forward(net, s, V0, config)
        vals.append(obj.wsr_fast(s.H, V, config.weights, config.noise_power))
    return float(np.mean(vals))


def train(net: StepsizeNet, config: NetworkConfig, train_samples: list[ChannelSet],
          val_samples: list[ChannelSet], tc: TrainConfig,
          log_path=None, state: TrainState | None = None,
          checkpoint_path=None, checkpoint_every: int = 1):
    """Two-stage hybrid training; returns (best net, log entries, final state).

    Stage 1 fits the unrolled output to solver labels; stage 2 fine-tunes on
    the rate objective.  The returned network carries the parameters with the
    best validation WSR seen at any epoch.  With ``checkpoint_path`` set, the
    full optimizer state is persisted so a run can resume bit-identically.
    """
    if not train_samples:
        raise EmptyDataset("no training samples")
    if not val_samples:
        raise EmptyDataset("no validation samples")

    state = state or TrainState()
    n_samples = len(train_samples)
    H_all = np.stack([s.H for s in train_samples])
    V0_all = np.stack([sample_initial_V(config, s) for s in train_samples])
    labels = None
    if tc.epochs_stage1 > state.next_epoch:
        labels = compute_labels(config, train_samples, tc.label_solver_iters)
    params = dict(net.param_items())
    log_entries = []
    log_fh = open(log_path, "a") if log_path is not None else None
    total_epochs = tc.epochs_stage1 + tc.epochs_stage2

    try:
        for epoch in range(state.next_epoch, total_epochs):
            stage = 1 if epoch < tc.epochs_stage1 else 2
            # halving restarts at the stage boundary: stage 2 optimizes a
            # different objective and needs a warm rate of its own
            stage_epoch = epoch if stage == 1 else epoch - tc.epochs_stage1
            lr = tc.initial_lr * 0.5 ** (stage_epoch // tc.lr_halving_epochs)
            perm = np.random.default_rng([tc.seed, 0xE70C, epoch]).permutation(n_samples)
            losses = []
            for start in range(0, n_samples, tc.batch_size):
                idx = perm[start:start + tc.batch_size]
                batch_labels = labels[idx] if stage == 1 else None
                loss, grads = batch_loss_and_grads(
                    net, H_all[idx], V0_all[idx], config, batch_labels)
                if not np.isfinite(loss):
                    raise DivergedTraining(f"non-finite loss at epoch {epoch}")
                state.adam.step(params, grads, lr)
                losses.append(loss)
            for p in params.values():
                if not np.all(np.isfinite(p)):
                    raise DivergedTraining(f"non-finite parameters at epoch {epoch}")

            val_nats = _validation_wsr(net, config, val_samples)
            if val_nats > state.best_val_nats:
                state.best_val_nats = val_nats
                state.best_params = {k: v.copy() for k, v in params.items()}
            entry = {
                "epoch": epoch,
                "stage": stage,
                "loss": float(np.mean(losses)),
                "val_wsr_nats": val_nats,
                "val_wsr_bits": val_nats / float(np.log(2.0)),
            }
            log_entries.append(entry)
            if log_fh is not None:
                log_fh.write(json.dumps(entry) + "\n")
                log_fh.flush()
            state.next_epoch = epoch + 1
            if checkpoint_path is not None and (epoch + 1) % checkpoint_every == 0:
                save_model(checkpoint_path, net, state=state)
    finally:
        if log_fh is not None:
            log_fh.close()

    best = net.copy()
    if state.best_params is not None:
        for name, value in best.param_items():
            value[...] = state.best_params[name]
    return best, log_entries, state


# -- checkpoint persistence ------------------------------------------------------

def _pack_array(a: np.ndarray) -> bytes:
    a = np.ascontiguousarray(a, dtype=np.complex128)
    inter = np.empty(a.size * 2, dtype="<f8")
    inter[0::2] = a.real.ravel()
    inter[1::2] = a.imag.ravel()
    return struct.pack("<II", a.shape[0], a.shape[1]) + inter.tobytes()


class _Cursor:
    def __init__(self, buf: bytes):
        self.buf, self.off = buf, 0

    def take(self, n: int) -> bytes:
        if self.off + n > len(self.buf):
            raise DeepFPError("model payload truncated")
        out = self.buf[self.off:self.off + n]
        self.off += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def array(self) -> np.ndarray:
        rows, cols = self.unpack("<II")
        inter = np.frombuffer(self.take(16 * rows * cols), dtype="<f8")
        return (inter[0::2] + 1j * inter[1::2]).reshape(rows, cols)


def save_model(path, net: StepsizeNet, state: TrainState | None = None) -> None:
    parts = [struct.pack("<IIIII", net.T, net.hidden_layers, net.hidden_units,
                         net.Nt, net.d)]
    for _, value in net.param_items():
        parts.append(_pack_array(value))
    if state is None:
        parts.append(struct.pack("<B", 0))
    else:
        parts.append(struct.pack("<B", 1))
        parts.append(struct.pack("<QId", state.adam.t, state.next_epoch,
                                 state.best_val_nats))
        for name, value in net.param_items():
            parts.append(_pack_array(state.adam.m.get(name, np.zeros_like(value))))
            parts.append(_pack_array(state.adam.v.get(name, np.zeros_like(value))))
        parts.append(struct.pack("<B", 1 if state.best_params is not None else 0))
        if state.best_params is not None:
            for name, _ in net.param_items():
                parts.append(_pack_array(state.best_params[name]))
    blob = b"".join(parts)
    with open(path, "wb") as fh:
        fh.write(_MODEL_MAGIC)
        fh.write(struct.pack("<H", _MODEL_VERSION))
        fh.write(blob)
        fh.write(struct.pack("<I", zlib.crc32(blob) & 0xFFFFFFFF))


def load_model(path):
    """Returns (net, state) where state is None for inference-only checkpoints."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 10 or raw[:4] != _MODEL_MAGIC:
        raise DeepFPError("not a model file")
    (version,) = struct.unpack("<H", raw[4:6])
    if version != _MODEL_VERSION:
        raise DeepFPError(f"unsupported model version {version}")
    payload, crc_bytes = raw[6:-4], raw[-4:]
    (crc_stored,) = struct.unpack("<I", crc_bytes)
    if zlib.crc32(payload) & 0xFFFFFFFF != crc_stored:
        raise DeepFPError("model CRC mismatch")
    cur = _Cursor(payload)
    T, hidden_layers, hidden_units, Nt, d = cur.unpack("<IIIII")
    net = init_stepsize_net(T, Nt, d, hidden_layers, hidden_units, seed=0)
    for _, value in net.param_items():
        value[...] = cur.array()
    (has_state,) = cur.unpack("<B")
    state = None
    if has_state:
        state = TrainState()
        state.adam.t, state.next_epoch, state.best_val_nats = cur.unpack("<QId")
        for name, value in net.param_items():
            state.adam.m[name] = cur.array().reshape(value.shape)
            state.adam.v[name] = cur.array().reshape(value.shape)
        (has_best,) = cur.unpack("<B")
        if has_best:
            state.best_params = {}
            for name, value in net.param_items():
                state.best_params[name] = cur.array().reshape(value.shape)
    if cur.off != len(payload):
        raise DeepFPError("model file has trailing bytes")
    return net, state
