"""PNG reading and writing for H x W x 3 float images."""

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from ..errors import DimensionError, ImageNotFoundError, MalformedImageError, UnsupportedDepthError
from ..tensor import Tensor

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
# Color types Pillow can hand back as RGB without losing information.
SUPPORTED_COLOR_TYPES = {0: "L", 2: "RGB", 3: "P", 4: "LA", 6: "RGBA"}


def as_image(pixels: np.ndarray) -> np.ndarray:
    """Validate and clamp an H x W x 3 array into a float32 image in [0, 1]."""
    array = np.asarray(pixels, dtype=np.float32)
    if array.ndim != 3 or array.shape[2] != 3:
        raise DimensionError(f"image must be H x W x 3, got shape {array.shape}")
    return np.clip(array, 0.0, 1.0)


def image_to_tensor(image: np.ndarray) -> Tensor:
    """H x W x 3 image to a [3, H, W] tensor."""
    return Tensor(np.transpose(image, (2, 0, 1)))


def tensor_to_image(tensor: Tensor) -> np.ndarray:
    """[3, H, W] tensor to a clamped H x W x 3 float32 image."""
    return as_image(np.transpose(tensor.data, (1, 2, 0)))


def _read_header(path: Path) -> tuple:
    with path.open("rb") as handle:
        header = handle.read(33)
    if len(header) < 33 or header[:8] != PNG_SIGNATURE or header[12:16] != b"IHDR":
        raise MalformedImageError(f"{path} is not a PNG file")
    width, height, bit_depth, color_type = struct.unpack(">IIBB", header[16:26])
    return width, height, bit_depth, color_type


def load_png(path: PathLike) -> np.ndarray:
    """Read an 8-bit RGB(A) PNG; values v map to v / 255 and alpha is dropped.

    Raises:
        ImageNotFoundError: The file does not exist.
        MalformedImageError: The file is not a decodable PNG.
        UnsupportedDepthError: The PNG is not 8 bits per sample.
    """
    path = Path(path)
    if not path.is_file():
        raise ImageNotFoundError(f"image not found: {path}")

    _, _, bit_depth, color_type = _read_header(path)
    if bit_depth != 8:
        raise UnsupportedDepthError(f"{path} has bit depth {bit_depth}, only 8-bit PNG is supported")
    if color_type not in SUPPORTED_COLOR_TYPES:
        raise MalformedImageError(f"{path} has unknown PNG color type {color_type}")

    try:
        with PILImage.open(path) as handle:
            rgb = handle.convert("RGB")
            pixels = np.asarray(rgb, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError) as e:
        raise MalformedImageError(f"could not decode {path}: {e}") from e

    return pixels.astype(np.float32) / np.float32(255.0)


def quantize(image: np.ndarray) -> np.ndarray:
    """Round half-up to 8-bit levels."""
    scaled = np.floor(np.clip(image, 0.0, 1.0).astype(np.float64) * 255.0 + 0.5)
    return scaled.astype(np.uint8)


def save_png(image: np.ndarray, path: PathLike) -> Path:
    """Write an image as an 8-bit RGB PNG, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    PILImage.fromarray(quantize(as_image(image))).save(path, format="PNG")
    logger.debug(f"Wrote {path}")
    return path
