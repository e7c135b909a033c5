"""Feature extraction for the graph model."""

import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Tuple

from ..errors import DimensionError
from ..models.network import ScaleTag
from ..tensor import Tensor, conv2d, leaky_relu

logger = logging.getLogger(__name__)

Params = Mapping[str, Tensor]

FEATURE_LAYERS = ("conv1", "conv2", "conv3")


@dataclass
class FeatureMap:
    """A [C, H, W] feature tensor tagged with the image it came from."""
    tensor: Tensor
    scale_tag: ScaleTag

    @property
    def channels(self) -> int:
        return self.tensor.shape[0]

    @property
    def spatial(self) -> Tuple[int, int]:
        return self.tensor.shape[1], self.tensor.shape[2]


def feature_shapes(channels: int, in_channels: int = 3) -> Dict[str, Tuple[int, ...]]:
    """Parameter shapes of the three-layer 3x3 extractor."""
    shapes: Dict[str, Tuple[int, ...]] = {}
    width_in = in_channels
    for layer in FEATURE_LAYERS:
        shapes[f"{layer}.weight"] = (channels, width_in, 3, 3)
        shapes[f"{layer}.bias"] = (channels,)
        width_in = channels
    return shapes


def extract_features(
    image: Tensor,
    params: Params,
    scale_tag: ScaleTag = ScaleTag.FULL,
    slope: float = 0.2,
) -> FeatureMap:
    """Lift a [3, H, W] image to a [C, H, W] feature map.

    Three 3x3 convolutions with padding 1; LeakyReLU follows the first two.

    Args:
        image (Tensor): Image tensor in channel-first layout.
        params (Params): ``conv{1,2,3}.weight`` and ``conv{1,2,3}.bias``.
        scale_tag (ScaleTag): Which image the features describe.
        slope (float): LeakyReLU negative slope.

    Returns:
        FeatureMap: Features at the input's spatial size.
    """
    if image.ndim != 3:
        raise DimensionError(f"extract_features expects [3, H, W], got shape {image.shape}")
    out = image
    for position, layer in enumerate(FEATURE_LAYERS):
        out = conv2d(out, params[f"{layer}.weight"], params[f"{layer}.bias"], padding=1)
        if position < len(FEATURE_LAYERS) - 1:
            out = leaky_relu(out, slope)
    return FeatureMap(tensor=out, scale_tag=scale_tag)
