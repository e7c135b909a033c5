"""Synthetic rain under the additive model rainy = clean + streaks."""

import logging
from typing import Tuple

import cv2
import numpy as np

from ..models.rain import RainParams
from .io import as_image

logger = logging.getLogger(__name__)


def streak_kernel(length_px: int, angle_deg: float) -> np.ndarray:
    """Motion-blur kernel of a ``length_px`` streak, normalized to sum 1.

    A vertical line through the kernel center is rotated about that center.
    Angle 0 is a vertical streak; positive angles run from the top left to
    the bottom right.
    """
    size = length_px
    center = (size - 1) / 2.0
    kernel = np.zeros((size, size), dtype=np.float32)
    kernel[:, (size - 1) // 2] += 0.5
    kernel[:, size // 2] += 0.5
    rotation = cv2.getRotationMatrix2D((center, center), angle_deg, 1.0)
    kernel = cv2.warpAffine(kernel, rotation, (size, size), flags=cv2.INTER_LINEAR)
    return kernel / kernel.sum()


def rain_layer(height: int, width: int, params: RainParams) -> np.ndarray:
    """Single-channel streak layer with peak value ``params.intensity``."""
    rng = np.random.default_rng(params.seed)
    seeds = (rng.random((height, width)) < params.density).astype(np.float32)
    kernel = streak_kernel(params.length_px, params.angle_deg)
    # The kernel is point-symmetric, so filter2D's correlation is a convolution.
    streaks = cv2.filter2D(seeds, -1, kernel, borderType=cv2.BORDER_CONSTANT)
    streaks[streaks < 0] = 0
    peak = float(streaks.max())
    if peak <= 0:
        return np.zeros((height, width), dtype=np.float32)
    return (streaks * (params.intensity / peak)).astype(np.float32)


def synth_rain(clean: np.ndarray, params: RainParams) -> Tuple[np.ndarray, np.ndarray]:
    """Add motion-blurred Bernoulli streaks to a clean image.

    Returns:
        Tuple[np.ndarray, np.ndarray]: ``(rainy, streaks)`` with
        ``rainy == clip(clean + streaks, 0, 1)`` elementwise.
    """
    clean = as_image(clean)
    height, width = clean.shape[:2]
    layer = rain_layer(height, width, params)
    streaks = np.repeat(layer[:, :, None], 3, axis=2)
    rainy = np.clip(clean + streaks, 0.0, 1.0)
    logger.debug(f"Synthesized rain on {height}x{width} image with seed {params.seed}")
    return rainy, streaks


def synthetic_background(height: int, width: int, seed: int) -> np.ndarray:
    """Smooth random scene used when no clean photographs are supplied.

    A blend of low-frequency color gradients, a few soft disks and fine
    texture, kept within [0.05, 0.85] so added streaks rarely saturate.
    """
    rng = np.random.default_rng(seed)
    rows, cols = np.mgrid[0:height, 0:width].astype(np.float64)
    rows /= max(height - 1, 1)
    cols /= max(width - 1, 1)

    image = np.zeros((height, width, 3), dtype=np.float64)
    for channel in range(3):
        a, b, c = rng.uniform(-1.0, 1.0, size=3)
        phase = rng.uniform(0, 2 * np.pi)
        image[:, :, channel] = 0.5 + 0.25 * (a * rows + b * cols) + 0.1 * np.sin(2 * np.pi * c * (rows + cols) + phase)

    for _ in range(rng.integers(2, 5)):
        center_r, center_c = rng.uniform(0, 1, size=2)
        radius = rng.uniform(0.08, 0.25)
        color = rng.uniform(0.0, 1.0, size=3)
        distance = np.sqrt((rows - center_r) ** 2 + (cols - center_c) ** 2)
        weight = np.clip(1.0 - distance / radius, 0.0, 1.0)[:, :, None]
        image = image * (1 - 0.6 * weight) + 0.6 * weight * color

    image += rng.normal(0.0, 0.02, size=image.shape)
    return as_image(0.05 + 0.8 * np.clip(image, 0.0, 1.0))
