"""Multi-scale resampling of images."""

import numpy as np

from ..errors import ContractError, DimensionError
from ..tensor import Tensor, bilinear_resize, no_grad
from .io import as_image

ALLOWED_FACTORS = (2, 4)


def downsample(image: np.ndarray, factor: int) -> np.ndarray:
    """Bilinear downsample of an H x W x 3 image by 2 or 4.

    Raises:
        ContractError: ``factor`` is not 2 or 4.
        DimensionError: H or W is not divisible by ``factor``.
    """
    if factor not in ALLOWED_FACTORS:
        raise ContractError(f"downsample factor must be one of {ALLOWED_FACTORS}, got {factor}")
    height, width = image.shape[:2]
    if height % factor or width % factor:
        raise DimensionError(f"image of size {height}x{width} is not divisible by {factor}")

    with no_grad():
        chw = Tensor(np.transpose(image, (2, 0, 1)))
        resized = bilinear_resize(chw, height // factor, width // factor)
    return as_image(np.transpose(resized.data, (1, 2, 0)))
