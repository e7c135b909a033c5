"""Decomposing feature maps into patch sets and reassembling them."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..errors import DimensionError
from ..models.network import ScaleTag
from ..tensor import Tensor, crop, fold_patches, reflect_pad, unfold_patches
from .features import FeatureMap


@dataclass(frozen=True)
class PatchGeometry:
    """Window grid of a patch set.

    ``height`` and ``width`` describe the padded map the windows tile exactly;
    ``source_height`` and ``source_width`` the map before padding.
    """

    rows: int
    cols: int
    size: int
    stride: int
    channels: int
    height: int
    width: int
    source_height: int
    source_width: int

    @property
    def count(self) -> int:
        return self.rows * self.cols

    @property
    def length(self) -> int:
        return self.channels * self.size * self.size

    def validate(self) -> None:
        for axis, extent, cells in (("H", self.height, self.rows), ("W", self.width, self.cols)):
            span = extent - self.size
            if span < 0 or span % self.stride or span // self.stride + 1 != cells:
                raise DimensionError(
                    f"patch geometry inconsistent on {axis}: extent {extent}, size {self.size}, "
                    f"stride {self.stride}, {cells} windows"
                )
        if self.source_height > self.height or self.source_width > self.width:
            raise DimensionError("patch geometry source size exceeds padded size")


@dataclass
class PatchSet:
    """Flattened patches, one row-major C x l x l window per row."""

    patches: Tensor
    geometry: PatchGeometry
    scale_tag: ScaleTag = ScaleTag.FULL

    @property
    def count(self) -> int:
        return self.patches.shape[0]

    @property
    def length(self) -> int:
        return self.patches.shape[1]

    @classmethod
    def from_rows(cls, rows: np.ndarray, scale_tag: ScaleTag = ScaleTag.FULL) -> "PatchSet":
        """Treat each row of a [Q, D] array as one 1x1 patch with D channels."""
        data = Tensor(np.atleast_2d(rows))
        count, length = data.shape
        geometry = PatchGeometry(
            rows=count, cols=1, size=1, stride=1, channels=length,
            height=count, width=1, source_height=count, source_width=1,
        )
        return cls(patches=data, geometry=geometry, scale_tag=scale_tag)


def _padding(extent: int, size: int, stride: int) -> int:
    return (stride - (extent - size) % stride) % stride


def img2patch(features: FeatureMap, size: int, stride: int) -> PatchSet:
    """Slide an ``size`` x ``size`` window with ``stride`` over a feature map.

    The map is reflection-padded at the bottom and right so that the windows
    tile it exactly; the geometry remembers the unpadded size.

    Raises:
        DimensionError: The window is larger than the map.
    """
    if size < 1 or stride < 1:
        raise DimensionError(f"patch size and stride must be positive, got l={size}, s={stride}")
    channels, height, width = features.tensor.shape
    if size > height or size > width:
        raise DimensionError(f"patch size {size} exceeds feature map of size {height}x{width}")

    bottom = _padding(height, size, stride)
    right = _padding(width, size, stride)
    padded = reflect_pad(features.tensor, bottom, right)
    padded_h, padded_w = height + bottom, width + right
    geometry = PatchGeometry(
        rows=(padded_h - size) // stride + 1,
        cols=(padded_w - size) // stride + 1,
        size=size,
        stride=stride,
        channels=channels,
        height=padded_h,
        width=padded_w,
        source_height=height,
        source_width=width,
    )
    return PatchSet(patches=unfold_patches(padded, size, stride), geometry=geometry, scale_tag=features.scale_tag)


def patch2img(patch_set: PatchSet, scale_tag: Optional[ScaleTag] = None) -> FeatureMap:
    """Scatter patches back, averaging overlaps, and crop any padding away."""
    geometry = patch_set.geometry
    geometry.validate()
    if patch_set.patches.shape != (geometry.count, geometry.length):
        raise DimensionError(
            f"patch tensor of shape {patch_set.patches.shape} does not match geometry "
            f"({geometry.count}, {geometry.length})"
        )
    shape: Tuple[int, int, int] = (geometry.channels, geometry.height, geometry.width)
    folded = fold_patches(patch_set.patches, shape, geometry.size, geometry.stride)
    tensor = crop(folded, geometry.source_height, geometry.source_width)
    return FeatureMap(tensor=tensor, scale_tag=scale_tag or patch_set.scale_tag)
