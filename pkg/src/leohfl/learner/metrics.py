"""Reconstruction quality metrics."""
from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeMismatch, TooSmall

SSIM_WINDOW = 8


def mse(original, reconstruction) -> float:
    a = np.asarray(original, dtype=np.float64)
    b = np.asarray(reconstruction, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def psnr_from_mse(mse_value: float, max_value: float = 1.0) -> float:
    if max_value <= 0:
        raise ValueError("max_value must be > 0")
    if mse_value == 0:
        return math.inf
    return 10.0 * math.log10(max_value ** 2 / mse_value)


def psnr(original, reconstruction, max_value: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; +inf when the images are identical."""
    return psnr_from_mse(mse(original, reconstruction), max_value)


def ssim(original, reconstruction, max_value: float = 1.0, window: int = SSIM_WINDOW) -> float:
    """Single-scale SSIM with a uniform `window` x `window` sliding window.

    Local statistics use population (biased) variances; the score is the
    mean over all window positions.
    """
    a = np.asarray(original, dtype=np.float64)
    b = np.asarray(reconstruction, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    if a.ndim != 2 or min(a.shape) < window:
        raise TooSmall(f"need a 2-D image of at least {window}x{window}, got {a.shape}")
    c1 = (0.01 * max_value) ** 2
    c2 = (0.03 * max_value) ** 2
    wa = sliding_window_view(a, (window, window))
    wb = sliding_window_view(b, (window, window))
    mu_a = wa.mean(axis=(-1, -2))
    mu_b = wb.mean(axis=(-1, -2))
    var_a = wa.var(axis=(-1, -2))
    var_b = wb.var(axis=(-1, -2))
    cov = (wa * wb).mean(axis=(-1, -2)) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def batch_ssim(originals: np.ndarray, reconstructions: np.ndarray, side: int,
               max_value: float = 1.0) -> float:
    """Mean SSIM over flattened side x side tiles."""
    a = np.asarray(originals).reshape(-1, side, side)
    b = np.asarray(reconstructions).reshape(-1, side, side)
    return float(np.mean([ssim(x, y, max_value, min(SSIM_WINDOW, side)) for x, y in zip(a, b)]))
