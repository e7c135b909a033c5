"""Backbone building blocks: gated residual blocks, fusion and graph injection."""

from typing import List, Mapping, Sequence

from ..errors import DimensionError
from ..graph import FeatureMap
from ..models.network import AttentionVariant
from ..tensor import (
    Tensor,
    bilinear_resize,
    concat_channels,
    conv2d,
    leaky_relu,
    mean,
    reflect_pad,
    relu,
    scale_channels,
    sigmoid,
)

Params = Mapping[str, Tensor]

INJECT_KERNEL = 5


def _conv(x: Tensor, params: Params, name: str, padding: int = 0, stride: int = 1) -> Tensor:
    return conv2d(x, params[f"{name}.weight"], params[f"{name}.bias"], stride=stride, padding=padding)


def channel_gate(x: Tensor, params: Params, variant: AttentionVariant, slope: float = 0.2) -> Tensor:
    """Rescale channels by a sigmoid gate computed from their global means."""
    if variant == AttentionVariant.NONE:
        return x
    pooled = mean(x, axis=(1, 2), keepdims=True)
    hidden = _conv(pooled, params, "gate.fc1")
    hidden = relu(hidden) if variant == AttentionVariant.SE else leaky_relu(hidden, slope)
    gate = sigmoid(_conv(hidden, params, "gate.fc2"))
    return scale_channels(x, gate)


def ct_res_block(
    x: Tensor,
    params: Params,
    variant: AttentionVariant = AttentionVariant.CT,
    slope: float = 0.2,
) -> Tensor:
    """Residual block ``x + gate(conv_b(leaky_relu(conv_a(x))))``.

    Raises:
        DimensionError: ``x`` does not have the block's channel count.
    """
    channels = params["conv_a.weight"].shape[1]
    if x.ndim != 3 or x.shape[0] != channels:
        raise DimensionError(f"residual block expects {channels} channels, got input of shape {x.shape}")
    body = leaky_relu(_conv(x, params, "conv_a", padding=1), slope)
    body = _conv(body, params, "conv_b", padding=1)
    return x + channel_gate(body, params, variant, slope)


def fusion_connection(features: Sequence[Tensor], params: Params) -> Tensor:
    """Concatenate sub-network outputs and mix them back to C channels with a 1x1 conv."""
    return conv2d(concat_channels(list(features)), params["weight"], params["bias"])


def _exact_pad(extent: int, stride: int) -> int:
    return (stride - (extent + 4 - INJECT_KERNEL) % stride) % stride


def _strided_conv(x: Tensor, params: Params, name: str, stride: int) -> Tensor:
    bottom = _exact_pad(x.shape[1], stride)
    right = _exact_pad(x.shape[2], stride)
    return _conv(reflect_pad(x, bottom, right), params, name, padding=2, stride=stride)


def graph_inject(
    backbone: Tensor,
    graph_features: Sequence[FeatureMap],
    params: Params,
    slope: float = 0.2,
    stride: int = 1,
) -> Tensor:
    """Merge graph features into a backbone connection with two 5x5 convolutions.

    With ``stride=2`` the convolutions downsample and the result is resized
    back to the backbone resolution.

    Raises:
        DimensionError: A graph feature map is not at backbone resolution.
    """
    height, width = backbone.shape[1:]
    inputs: List[Tensor] = [backbone]
    for feature in graph_features:
        if feature.tensor.shape[1:] != (height, width):
            raise DimensionError(
                f"{feature.scale_tag.value} graph features are {feature.tensor.shape[1]}x{feature.tensor.shape[2]}, "
                f"backbone is {height}x{width}"
            )
        inputs.append(feature.tensor)
    merged = concat_channels(inputs)

    hidden = leaky_relu(_strided_conv(merged, params, "conv1", stride), slope)
    out = _strided_conv(hidden, params, "conv2", stride)
    return bilinear_resize(out, height, width)
