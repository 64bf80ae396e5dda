"""Dense joint source-channel autoencoder in plain numpy.

encoder MLP -> per-sample power normalisation -> AWGN -> decoder MLP (sigmoid
output).  Parameters live in one flat vector so that the federated layer can
average them directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..aggregation import ClientReport, ParamVector
from ..errors import DimensionMismatch, EmptyDataset
from .data import Dataset


@dataclass(frozen=True)
class AutoencoderSpec:
    input_dim: int = 64
    latent_dim: int = 16
    hidden_dims: tuple[int, ...] = (32,)
    activation: str = "tanh"

    def __post_init__(self):
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))
        if min(self.input_dim, self.latent_dim, *self.hidden_dims, 1) < 1:
            raise ValueError("all layer widths must be >= 1")
        if self.latent_dim >= self.input_dim:
            raise ValueError("latent_dim must be smaller than input_dim")
        if self.activation not in ("relu", "tanh"):
            raise ValueError(f"unsupported activation {self.activation!r}")

    @property
    def dims(self) -> list[int]:
        return [self.input_dim, *self.hidden_dims, self.latent_dim,
                *reversed(self.hidden_dims), self.input_dim]

    @property
    def n_encoder_layers(self) -> int:
        return len(self.hidden_dims) + 1

    @property
    def shapes(self) -> list[tuple[int, int]]:
        d = self.dims
        return [(d[i], d[i + 1]) for i in range(len(d) - 1)]

    @property
    def n_params(self) -> int:
        return sum(i * o + o for i, o in self.shapes)

    @property
    def layout_tag(self) -> str:
        return "dense:" + "-".join(map(str, self.dims)) + ":" + self.activation


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1.0
    batch_size: int = 16
    snr_db: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def noise_std(snr_db: float) -> float:
    """Per-symbol AWGN standard deviation at unit signal power; 0 for +inf dB."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return math.sqrt(10.0 ** (-snr_db / 10.0))


def init_params(spec: AutoencoderSpec, seed: int | np.random.Generator = 0) -> ParamVector:
    rng = np.random.default_rng(seed)
    chunks = []
    for fan_in, fan_out in spec.shapes:
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        chunks.append(rng.uniform(-limit, limit, size=fan_in * fan_out))
        chunks.append(np.zeros(fan_out))
    return ParamVector(np.concatenate(chunks), spec.layout_tag)


def unpack(spec: AutoencoderSpec, flat: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Views (W, b) per layer into `flat`."""
    if flat.size != spec.n_params:
        raise DimensionMismatch(f"expected {spec.n_params} parameters, got {flat.size}")
    layers, i = [], 0
    for fan_in, fan_out in spec.shapes:
        w = flat[i:i + fan_in * fan_out].reshape(fan_in, fan_out)
        i += fan_in * fan_out
        b = flat[i:i + fan_out]
        i += fan_out
        layers.append((w, b))
    return layers


def _act(name, a):
    return np.tanh(a) if name == "tanh" else np.maximum(a, 0.0)


def _act_grad(name, a, h):
    return 1.0 - h * h if name == "tanh" else (a > 0).astype(a.dtype)


def _sigmoid(a):
    return 0.5 * (1.0 + np.tanh(0.5 * a))


def power_normalize(z: np.ndarray) -> np.ndarray:
    """Scale each row to unit average symbol power (mean of squares = 1)."""
    norm = np.linalg.norm(z, axis=-1, keepdims=True)
    return z * (math.sqrt(z.shape[-1]) / np.maximum(norm, 1e-12))


@dataclass
class ForwardResult:
    reconstruction: np.ndarray
    latent: np.ndarray
    cache: dict = field(default_factory=dict, repr=False)


def _check_input(spec: AutoencoderSpec, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != spec.input_dim:
        raise DimensionMismatch(f"input has {x.shape[-1]} features, model expects {spec.input_dim}")
    return x


def forward(spec: AutoencoderSpec, params: ParamVector, x, snr_db: float = math.inf,
            noise_seed: int | np.random.Generator | None = None,
            noise: np.ndarray | None = None) -> ForwardResult:
    """Encode, normalise, add channel noise, decode.

    `noise` (unit-variance draws, same shape as the latent) overrides
    `noise_seed`; it is scaled by the channel's noise standard deviation.
    """
    x = _check_input(spec, x)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    layers = unpack(spec, params.values)
    n_enc = spec.n_encoder_layers

    pre, post = [], [X]
    h = X
    for i, (w, b) in enumerate(layers):
        if i == n_enc:
            z = h
            norm = np.maximum(np.linalg.norm(z, axis=1, keepdims=True), 1e-12)
            latent = z * (math.sqrt(spec.latent_dim) / norm)
            sigma = noise_std(snr_db)
            if sigma > 0:
                if noise is None:
                    noise = np.random.default_rng(noise_seed).standard_normal(latent.shape)
                h = latent + sigma * noise
            else:
                h = latent
            post[-1] = h
        a = h @ w + b
        pre.append(a)
        if i == len(layers) - 1:
            h = _sigmoid(a)
        elif i == n_enc - 1:
            h = a
        else:
            h = _act(spec.activation, a)
        post.append(h)

    cache = {"pre": pre, "post": post, "z": z, "norm": norm, "latent": latent}
    recon = h[0] if single else h
    return ForwardResult(recon, latent[0] if single else latent, cache)


def loss_and_grad(spec: AutoencoderSpec, params: ParamVector, x, snr_db: float = math.inf,
                  noise: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Mean squared reconstruction error and its gradient w.r.t. the flat params.

    The channel noise is held fixed, so it contributes an identity path
    through the noise addition.
    """
    X = np.atleast_2d(_check_input(spec, x))
    res = forward(spec, params, X, snr_db, noise=noise)
    pre, post = res.cache["pre"], res.cache["post"]
    layers = unpack(spec, params.values)
    n_enc = spec.n_encoder_layers
    out = post[-1]
    diff = out - X
    loss = float(np.mean(diff * diff))

    grad = np.empty_like(params.values)
    grads = unpack(spec, grad)
    delta = (2.0 / diff.size) * diff * out * (1.0 - out)
    for i in range(len(layers) - 1, -1, -1):
        w, _ = layers[i]
        gw, gb = grads[i]
        gw[...] = post[i].T @ delta
        gb[...] = delta.sum(axis=0)
        if i == 0:
            break
        g = delta @ w.T
        if i == n_enc:
            # through the power normalisation: d(sqrt(k) z/|z|)
            z, norm = res.cache["z"], res.cache["norm"]
            u = z / norm
            g = (math.sqrt(spec.latent_dim) / norm) * (g - np.sum(g * u, axis=1, keepdims=True) * u)
        else:
            g = g * _act_grad(spec.activation, pre[i - 1], post[i])
        delta = g
    return loss, grad


def mse_loss(spec: AutoencoderSpec, params: ParamVector, x, snr_db: float = math.inf,
             noise: np.ndarray | None = None) -> float:
    X = np.atleast_2d(_check_input(spec, x))
    out = forward(spec, params, X, snr_db, noise=noise).reconstruction
    return float(np.mean((out - X) ** 2))


def train_epochs(spec: AutoencoderSpec, params: ParamVector, dataset: Dataset, k: int,
                 cfg: TrainConfig, rng: np.random.Generator | int | None = None) -> ClientReport:
    """`k` passes of mini-batch gradient descent on a private copy of `params`.

    Channel noise is redrawn for every sample of every batch.  The reported
    loss is the sample-weighted mean loss of the final epoch (or the current
    loss when k == 0).
    """
    if k < 0:
        raise ValueError(f"epoch count must be >= 0, got {k}")
    X = dataset.samples
    n = X.shape[0]
    if n == 0:
        raise EmptyDataset(f"satellite {dataset.owner} has no samples")
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    latent_shape = (spec.latent_dim,)

    if k == 0:
        noise = rng.standard_normal((n, *latent_shape))
        loss = mse_loss(spec, params, X, cfg.snr_db, noise)
        return ClientReport(params.copy(), n, 0, loss, dataset.owner)

    theta = params.values.copy()
    work = ParamVector(theta, params.layout_tag)
    bs = cfg.batch_size
    for _ in range(k):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, bs):
            idx = order[start:start + bs]
            noise = rng.standard_normal((idx.size, *latent_shape))
            loss, grad = loss_and_grad(spec, work, X[idx], cfg.snr_db, noise)
            theta -= cfg.learning_rate * grad
            total += loss * idx.size
        epoch_loss = total / n
    return ClientReport(ParamVector(theta, params.layout_tag), n, k, epoch_loss, dataset.owner)


def reconstruct(spec: AutoencoderSpec, params: ParamVector, x, snr_db: float,
                seed: int) -> np.ndarray:
    """Deterministic evaluation pass with a fixed noise seed."""
    return forward(spec, params, x, snr_db, noise_seed=seed).reconstruction
