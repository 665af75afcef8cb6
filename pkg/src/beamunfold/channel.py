"""Scenario and CSI generation for hexagonal multicell networks.

Base stations sit on a triangular lattice with the configured inter-site
distance; users are dropped uniformly inside their serving hexagon.  Link
distances use the 7-site torus convention: every BS-user distance is the
minimum over the identity translation and the six wrap-around lattice
translations of norm D*sqrt(7).

All powers are linear and milliwatt-referenced; dBm figures are converted
once at config construction.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

PATH_LOSS_INTERCEPT_DB = 128.1
PATH_LOSS_SLOPE_DB = 37.6
MIN_LINK_KM = 0.01

_FILE_MAGIC = b"BUNF"
_FILE_VERSION = 1
FADING_SHADOWED = 0
FADING_RAYLEIGH = 1
_FADING_NAMES = {FADING_SHADOWED: "shadowed", FADING_RAYLEIGH: "rayleigh"}


class ChannelError(Exception):
    pass


class NonPositiveDistance(ChannelError):
    pass


class FormatVersionMismatch(ChannelError):
    pass


class ChecksumMismatch(ChannelError):
    pass


def dbm_to_linear(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


@dataclass(frozen=True)
class NetworkConfig:
    """Static scenario description; powers in linear mW."""

    L: int
    K: int
    Nt: int
    Nr: int
    d: int
    weights: np.ndarray          # (L, K) nonnegative
    power: np.ndarray            # (L,) per-BS budget, linear mW
    noise_power: float           # linear mW
    cell_distance_km: float = 0.8
    shadowing_std_db: float = 8.0

    def __post_init__(self):
        if self.L < 1 or self.K < 1:
            raise ValueError("L and K must be >= 1")
        if not (1 <= self.d <= self.Nr <= self.Nt):
            raise ValueError("need 1 <= d <= Nr <= Nt")
        w = np.asarray(self.weights, dtype=float).reshape(self.L, self.K)
        p = np.asarray(self.power, dtype=float).reshape(self.L)
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if np.any(p <= 0) or self.noise_power <= 0:
            raise ValueError("powers must be positive")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "power", p)

    @classmethod
    def from_dbm(cls, L, K, Nt, Nr, d, power_dbm=20.0, noise_dbm=-90.0,
                 cell_distance_km=0.8, shadowing_std_db=8.0, weight=1.0) -> "NetworkConfig":
        return cls(
            L=L, K=K, Nt=Nt, Nr=Nr, d=d,
            weights=np.full((L, K), float(weight)),
            power=np.full(L, dbm_to_linear(power_dbm)),
            noise_power=dbm_to_linear(noise_dbm),
            cell_distance_km=cell_distance_km,
            shadowing_std_db=shadowing_std_db,
        )


@dataclass(frozen=True)
class ChannelSet:
    """One CSI realization: H[l, k, i] is the Nr x Nt channel BS i -> user (l,k)."""

    H: np.ndarray                # (L, K, L, Nr, Nt) complex128
    seed: int
    user_positions: np.ndarray   # (L, K, 2) km

    def __post_init__(self):
        if not np.all(np.isfinite(self.H)):
            raise ChannelError("channel tensor contains non-finite entries")


def path_loss_db(r_km: float, xi_db: float = 0.0) -> float:
    """Distance-dependent loss plus a shadowing term, in dB."""
    if r_km <= 0:
        raise NonPositiveDistance(f"distance must be positive, got {r_km}")
    return PATH_LOSS_INTERCEPT_DB + PATH_LOSS_SLOPE_DB * np.log10(r_km) + xi_db


def bs_positions(config: NetworkConfig) -> np.ndarray:
    """Cell-center coordinates (L, 2): triangular-lattice sites sorted by radius."""
    D = config.cell_distance_km
    u = np.array([1.0, 0.0]) * D
    v = np.array([0.5, np.sqrt(3.0) / 2.0]) * D
    span = 3
    pts = []
    for a in range(-span, span + 1):
        for b in range(-span, span + 1):
            p = a * u + b * v
            pts.append((np.hypot(*p), np.arctan2(p[1], p[0]), p[0], p[1]))
    pts.sort(key=lambda t: (round(t[0], 12), round(t[1], 12)))
    if config.L > len(pts):
        raise ValueError("cell count exceeds generated lattice span")
    return np.array([[x, y] for _, _, x, y in pts[: config.L]])


def wrap_translations(cell_distance_km: float) -> np.ndarray:
    """Identity plus the six 7-cell torus translations, shape (7, 2)."""
    D = cell_distance_km
    base = D * np.array([2.5, np.sqrt(3.0) / 2.0])  # norm D*sqrt(7)
    out = [np.zeros(2)]
    for k in range(6):
        ang = k * np.pi / 3.0
        rot = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
        out.append(rot @ base)
    return np.array(out)


def wrap_distance(p: np.ndarray, q: np.ndarray, cell_distance_km: float) -> float:
    """Minimum-image distance between two planar points on the 7-cell torus."""
    diffs = p - q - wrap_translations(cell_distance_km)
    return float(np.min(np.hypot(diffs[:, 0], diffs[:, 1])))


def _hexagon_contains(p: np.ndarray, D: float) -> bool:
    # Voronoi hexagon of the triangular lattice: three slabs of half-width D/2
    for ang in (0.0, np.pi / 3.0, 2.0 * np.pi / 3.0):
        n = np.array([np.cos(ang), np.sin(ang)])
        if abs(float(p @ n)) > D / 2.0 + 1e-15:
            return False
    return True


def _draw_positions(config: NetworkConfig, rng: np.random.Generator) -> np.ndarray:
    D = config.cell_distance_km
    radius = D / np.sqrt(3.0)
    bs = bs_positions(config)
    pos = np.zeros((config.L, config.K, 2))
    for l in range(config.L):
        for k in range(config.K):
            while True:
                offset = rng.uniform(-radius, radius, size=2)
                if not _hexagon_contains(offset, D):
                    continue
                if np.hypot(*offset) < MIN_LINK_KM:
                    continue
                pos[l, k] = bs[l] + offset
                break
    return pos


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return np.sqrt(0.5) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_scenario(config: NetworkConfig, seed: int,
                      user_positions: np.ndarray | None = None) -> ChannelSet:
    """Shadowed path-loss scenario, fully determined by (config, seed).

    ``user_positions`` pins user locations (shape (L, K, 2)) for controlled
    experiments; the positional RNG draws are skipped in that case.
    """
    rng = np.random.default_rng(seed)
    if user_positions is None:
        pos = _draw_positions(config, rng)
    else:
        pos = np.asarray(user_positions, dtype=float).reshape(config.L, config.K, 2)
    bs = bs_positions(config)
    H = np.zeros((config.L, config.K, config.L, config.Nr, config.Nt), dtype=np.complex128)
    for l in range(config.L):
        for k in range(config.K):
            for i in range(config.L):
                xi = rng.standard_normal() * config.shadowing_std_db
                r = max(wrap_distance(pos[l, k], bs[i], config.cell_distance_km), MIN_LINK_KM)
                gain = 10.0 ** (-path_loss_db(r, xi) / 10.0)
                H[l, k, i] = np.sqrt(gain) * _complex_normal(rng, (config.Nr, config.Nt))
    return ChannelSet(H=H, seed=int(seed), user_positions=pos)


def generate_rayleigh(config: NetworkConfig, seed: int,
                      user_positions: np.ndarray | None = None) -> ChannelSet:
    """Unit-variance Rayleigh fading: no path loss, no shadowing."""
    rng = np.random.default_rng(seed)
    if user_positions is None:
        pos = _draw_positions(config, rng)
    else:
        pos = np.asarray(user_positions, dtype=float).reshape(config.L, config.K, 2)
    shape = (config.L, config.K, config.L, config.Nr, config.Nt)
    H = _complex_normal(rng, shape)
    return ChannelSet(H=H, seed=int(seed), user_positions=pos)


def derive_sample_seed(base_seed: int, index: int) -> int:
    """Independent, deterministic 64-bit stream key for sample ``index``."""
    mask = (1 << 64) - 1
    x = (base_seed + (index + 1) * 0x9E3779B97F4A7C15) & mask
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & mask
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & mask
    x ^= x >> 31
    return x


# -- dataset persistence ----------------------------------------------------

def _pack_config(config: NetworkConfig, fading: int) -> bytes:
    parts = [struct.pack("<BIIIII", fading, config.L, config.K, config.Nt,
                         config.Nr, config.d)]
    parts.append(config.weights.astype("<f8").tobytes())
    parts.append(config.power.astype("<f8").tobytes())
    parts.append(struct.pack("<ddd", config.noise_power, config.cell_distance_km,
                             config.shadowing_std_db))
    return b"".join(parts)


def save_dataset(path, config: NetworkConfig, samples: list[ChannelSet],
                 fading: str = "shadowed") -> None:
    fading_code = {v: k for k, v in _FADING_NAMES.items()}[fading]
    payload = [_pack_config(config, fading_code)]
    payload.append(struct.pack("<I", len(samples)))
    for s in samples:
        payload.append(struct.pack("<Q", s.seed & ((1 << 64) - 1)))
        payload.append(np.asarray(s.user_positions, dtype="<f8").tobytes())
        flat = np.ascontiguousarray(s.H)  # (l, k, i, row, col) C-order
        inter = np.empty(flat.size * 2, dtype="<f8")
        inter[0::2] = flat.real.ravel()
        inter[1::2] = flat.imag.ravel()
        payload.append(inter.tobytes())
    blob = b"".join(payload)
    with open(path, "wb") as fh:
        fh.write(_FILE_MAGIC)
        fh.write(struct.pack("<H", _FILE_VERSION))
        fh.write(blob)
        fh.write(struct.pack("<I", zlib.crc32(blob) & 0xFFFFFFFF))


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.off = 0

    def take(self, n: int) -> bytes:
        if self.off + n > len(self.buf):
            raise ChecksumMismatch("dataset payload truncated")
        out = self.buf[self.off:self.off + n]
        self.off += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def load_dataset_full(path):
    """Returns (config, samples, fading_name)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 10 or raw[:4] != _FILE_MAGIC:
        raise FormatVersionMismatch("not a dataset file")
    (version,) = struct.unpack("<H", raw[4:6])
    if version != _FILE_VERSION:
        raise FormatVersionMismatch(f"unsupported dataset version {version}")
    payload, crc_bytes = raw[6:-4], raw[-4:]
    (crc_stored,) = struct.unpack("<I", crc_bytes)
    if zlib.crc32(payload) & 0xFFFFFFFF != crc_stored:
        raise ChecksumMismatch("dataset CRC mismatch")

    r = _Reader(payload)
    fading_code, L, K, Nt, Nr, d = r.unpack("<BIIIII")
    weights = np.frombuffer(r.take(8 * L * K), dtype="<f8").reshape(L, K).copy()
    power = np.frombuffer(r.take(8 * L), dtype="<f8").copy()
    noise, dist, shadow = r.unpack("<ddd")
    config = NetworkConfig(L=L, K=K, Nt=Nt, Nr=Nr, d=d, weights=weights,
                           power=power, noise_power=noise,
                           cell_distance_km=dist, shadowing_std_db=shadow)
    (count,) = r.unpack("<I")
    samples = []
    tensor_len = L * K * L * Nr * Nt
    for _ in range(count):
        (seed,) = r.unpack("<Q")
        pos = np.frombuffer(r.take(8 * L * K * 2), dtype="<f8").reshape(L, K, 2).copy()
        inter = np.frombuffer(r.take(16 * tensor_len), dtype="<f8")
        H = (inter[0::2] + 1j * inter[1::2]).reshape(L, K, L, Nr, Nt)
        samples.append(ChannelSet(H=H, seed=int(seed), user_positions=pos))
    if r.off != len(payload):
        raise ChecksumMismatch("dataset has trailing bytes")
    return config, samples, _FADING_NAMES[fading_code]


def load_dataset(path):
    """Returns (config, samples); round-trip of save_dataset is bitwise lossless."""
    config, samples, _ = load_dataset_full(path)
    return config, samples
