"""Tile datasets: synthetic procedural textures, optional image corpus, Dirichlet splits."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Dataset:
    samples: np.ndarray          # (n, input_dim), values in [0, 1]
    owner: int | None = None

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 2:
            raise ValueError("samples must be a 2-D array (n, input_dim)")
        if s.size and (s.min() < 0.0 or s.max() > 1.0):
            raise ValueError("pixel values must lie in [0, 1]")
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return self.samples.shape[0]


def _grating(rng, yy, xx, side):
    theta = rng.uniform(0, np.pi)
    freq = rng.uniform(0.5, 2.5) / side
    phase = rng.uniform(0, 2 * np.pi)
    amp = rng.uniform(0.2, 0.5)
    return 0.5 + amp * np.sin(2 * np.pi * freq * (xx * np.cos(theta) + yy * np.sin(theta)) + phase)


def _gradient(rng, yy, xx, side):
    theta = rng.uniform(0, 2 * np.pi)
    ramp = (xx * np.cos(theta) + yy * np.sin(theta)) / side
    return rng.uniform(0.2, 0.8) + rng.uniform(0.3, 0.8) * (ramp - ramp.mean())


def _blob(rng, yy, xx, side):
    cy, cx = rng.uniform(0, side, size=2)
    width = rng.uniform(0.15, 0.4) * side
    bump = np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * width ** 2))
    base = rng.uniform(0.1, 0.5)
    return base + rng.uniform(0.3, 1.0 - base) * bump


def _edge(rng, yy, xx, side):
    theta = rng.uniform(0, 2 * np.pi)
    offset = rng.uniform(-0.3, 0.3) * side
    c = side / 2 - 0.5
    s = (xx - c) * np.cos(theta) + (yy - c) * np.sin(theta) - offset
    lo, hi = np.sort(rng.uniform(0.05, 0.95, size=2))
    return lo + (hi - lo) / (1.0 + np.exp(-2.0 * s))


_FAMILIES = (_grating, _gradient, _blob, _edge)


def synthetic_tiles(n: int, side: int = 8, seed: int | np.random.Generator = 0,
                    pixel_noise: float = 0.02) -> np.ndarray:
    """`n` procedural grayscale tiles, flattened to (n, side*side) in [0, 1]."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:side, 0:side].astype(np.float64)
    out = np.empty((n, side * side))
    for i in range(n):
        family = _FAMILIES[rng.integers(len(_FAMILIES))]
        tile = family(rng, yy, xx, side) + pixel_noise * rng.standard_normal((side, side))
        out[i] = np.clip(tile, 0.0, 1.0).ravel()
    return out


def load_tile_corpus(directory: str | Path, side: int = 8, limit: int | None = None) -> np.ndarray:
    """Cut every image in `directory` into non-overlapping side x side tiles.

    Images are read as 8-bit grayscale (anything Pillow can open) and scaled
    to [0, 1]; files are visited in sorted order.
    """
    from PIL import Image

    tiles = []
    for path in sorted(Path(directory).iterdir()):
        if not path.is_file():
            continue
        try:
            img = np.asarray(Image.open(path).convert("L"), dtype=np.float64) / 255.0
        except OSError:
            continue
        h, w = (img.shape[0] // side) * side, (img.shape[1] // side) * side
        blocks = img[:h, :w].reshape(h // side, side, w // side, side).swapaxes(1, 2)
        tiles.append(blocks.reshape(-1, side * side))
    if not tiles:
        raise ValueError(f"no readable images in {directory}")
    out = np.concatenate(tiles)
    return out[:limit] if limit is not None else out


def _largest_remainder(props: np.ndarray, total: int) -> np.ndarray:
    raw = props * total
    counts = np.floor(raw).astype(int)
    leftover = total - counts.sum()
    counts[np.argsort(-(raw - counts), kind="stable")[:leftover]] += 1
    return counts


def dirichlet_partition(total: Dataset, n_clients: int, lam: float,
                        seed: int | np.random.Generator = 0,
                        min_count: int = 0, n_groups: int = 10) -> list[Dataset]:
    """Split `total` into `n_clients` disjoint shards with Dirichlet(lam) sizes.

    Samples are shuffled once, so only the shard sizes are skewed, not their
    content.  The shuffled pool is cut into `n_groups` equal blocks and each
    block is divided by its own Dirichlet draw, the way a per-class split of a
    `n_groups`-class dataset would size the shards; `n_groups=1` is a single
    draw over the whole pool.  `min_count` samples are reserved for every
    client first.  Shard i is owned by client i.
    """
    if n_clients < 1:
        raise ValueError("n_clients must be >= 1")
    if lam <= 0:
        raise ValueError("lambda must be > 0")
    if n_groups < 1:
        raise ValueError("n_groups must be >= 1")
    n = len(total)
    if min_count * n_clients > n:
        raise ValueError("not enough samples for the requested minimum shard size")
    rng = np.random.default_rng(seed)
    if n_clients == 1:
        return [Dataset(total.samples.copy(), owner=0)]

    order = rng.permutation(n)
    reserved = min_count * n_clients
    pieces: list[list[np.ndarray]] = [[order[i * min_count:(i + 1) * min_count]]
                                      for i in range(n_clients)]
    for block in np.array_split(order[reserved:], n_groups):
        counts = _largest_remainder(rng.dirichlet(np.full(n_clients, lam)), block.size)
        bounds = np.concatenate([[0], np.cumsum(counts)])
        for i in range(n_clients):
            pieces[i].append(block[bounds[i]:bounds[i + 1]])
    return [Dataset(total.samples[np.sort(np.concatenate(pieces[i]))], owner=i)
            for i in range(n_clients)]
