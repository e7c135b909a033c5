"""PSNR and SSIM, plus a differentiable SSIM on tensors for the loss path."""

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError
from ..tensor import Tensor, conv2d, mean, reshape

WINDOW_SIZE = 11
WINDOW_SIGMA = 1.5
K1 = 0.01
K2 = 0.03
DATA_RANGE = 1.0
C1 = (K1 * DATA_RANGE) ** 2
C2 = (K2 * DATA_RANGE) ** 2


def _check_pair(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"images differ in size: {a.shape} vs {b.shape}")


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB with peak 1.0; ``inf`` for identical images."""
    _check_pair(a, b)
    mse = float(np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(DATA_RANGE**2 / mse)


def gaussian_window(size: int = WINDOW_SIZE, sigma: float = WINDOW_SIGMA) -> np.ndarray:
    """Normalized 1-D Gaussian taps."""
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    taps = np.exp(-(offsets**2) / (2 * sigma**2))
    return taps / taps.sum()


def _filter_valid(plane: np.ndarray, taps: np.ndarray) -> np.ndarray:
    rows = sliding_window_view(plane, taps.size, axis=0) @ taps
    return sliding_window_view(rows, taps.size, axis=1) @ taps


def _ssim_plane(x: np.ndarray, y: np.ndarray, taps: np.ndarray) -> float:
    mu_x = _filter_valid(x, taps)
    mu_y = _filter_valid(y, taps)
    sigma_xx = _filter_valid(x * x, taps) - mu_x * mu_x
    sigma_yy = _filter_valid(y * y, taps) - mu_y * mu_y
    sigma_xy = _filter_valid(x * y, taps) - mu_x * mu_y
    numerator = (2 * mu_x * mu_y + C1) * (2 * sigma_xy + C2)
    denominator = (mu_x * mu_x + mu_y * mu_y + C1) * (sigma_xx + sigma_yy + C2)
    return float(np.mean(numerator / denominator))


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean SSIM over valid 11x11 Gaussian windows, averaged over channels."""
    _check_pair(a, b)
    if min(a.shape[:2]) < WINDOW_SIZE:
        raise DimensionError(f"image of size {a.shape[0]}x{a.shape[1]} is smaller than the {WINDOW_SIZE}x{WINDOW_SIZE} SSIM window")
    taps = gaussian_window()
    x = a.astype(np.float64)
    y = b.astype(np.float64)
    return float(np.mean([_ssim_plane(x[:, :, c], y[:, :, c], taps) for c in range(x.shape[2])]))


def ssim_tensor(a: Tensor, b: Tensor) -> Tensor:
    """Differentiable SSIM of two [C, H, W] tensors as a scalar tensor.

    Matches :func:`ssim` on the same data: each channel is filtered with the
    same separable Gaussian window over valid positions.
    """
    if a.shape != b.shape:
        raise DimensionError(f"tensors differ in shape: {a.shape} vs {b.shape}")
    if a.ndim != 3:
        raise DimensionError(f"ssim_tensor expects [C, H, W], got shape {a.shape}")
    channels, height, width = a.shape
    if min(height, width) < WINDOW_SIZE:
        raise DimensionError(f"tensor of size {height}x{width} is smaller than the {WINDOW_SIZE}x{WINDOW_SIZE} SSIM window")

    taps = gaussian_window()
    window = Tensor(np.outer(taps, taps).reshape(1, 1, WINDOW_SIZE, WINDOW_SIZE))

    def blur(x: Tensor) -> Tensor:
        # Channels ride on the batch axis so one window filters each plane.
        return conv2d(reshape(x, (channels, 1, height, width)), window)

    mu_x = blur(a)
    mu_y = blur(b)
    mu_xx = mu_x * mu_x
    mu_yy = mu_y * mu_y
    mu_xy = mu_x * mu_y
    sigma_xx = blur(a * a) - mu_xx
    sigma_yy = blur(b * b) - mu_yy
    sigma_xy = blur(a * b) - mu_xy
    numerator = (mu_xy * 2.0 + C1) * (sigma_xy * 2.0 + C2)
    denominator = (mu_xx + mu_yy + C1) * (sigma_xx + sigma_yy + C2)
    return mean(numerator / denominator)
