"""The deraining network: graph branches, sub-networks and residual output."""

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..errors import DimensionError
from ..graph import FeatureMap, extract_features, graph_relate
from ..imaging.io import as_image, image_to_tensor, tensor_to_image
from ..models.network import SCALE_FACTORS, MsgnnConfig, ScaleTag
from ..tensor import Tensor, bilinear_resize, clamp, conv2d, crop, leaky_relu, no_grad, reflect_pad
from .blocks import ct_res_block, fusion_connection, graph_inject
from .parameters import ParameterStore

logger = logging.getLogger(__name__)

SIZE_MULTIPLE = 4


def _pad_amount(extent: int) -> int:
    return (SIZE_MULTIPLE - extent % SIZE_MULTIPLE) % SIZE_MULTIPLE


def graph_branches(
    rainy: Tensor,
    exemplar: Tensor,
    params: ParameterStore,
    config: MsgnnConfig,
) -> List[FeatureMap]:
    """Graph outputs for every enabled branch, in ``config.graph_branches`` order."""
    branches = config.graph_branches
    if not branches:
        return []
    feature_params = params.scope("features")
    attention_params = params.scope("attention")
    slope = config.leaky_slope
    query = extract_features(rainy, feature_params, ScaleTag.FULL, slope)

    outputs: List[FeatureMap] = []
    for tag in branches:
        reuse: Optional[FeatureMap] = None
        if tag == ScaleTag.EXEMPLAR:
            other = exemplar
        elif tag == ScaleTag.FULL:
            other, reuse = rainy, query
        else:
            factor = SCALE_FACTORS[tag]
            other = bilinear_resize(rainy, rainy.shape[1] // factor, rainy.shape[2] // factor)
        outputs.append(
            graph_relate(
                query,
                other,
                feature_params,
                attention_params,
                k=config.k,
                size=config.patch_size,
                stride=config.stride,
                scale_tag=tag,
                slope=slope,
                other_features=reuse,
            )
        )
    return outputs


def forward(
    rainy: np.ndarray,
    exemplar: Optional[np.ndarray],
    params: ParameterStore,
    config: MsgnnConfig,
) -> Tuple[Tensor, Tensor]:
    """Predict the rain layer of ``rainy`` and subtract it.

    The input is reflection-padded to a multiple of 4 so the half and
    quarter scales are exact, and every output is cropped back.

    Args:
        rainy (np.ndarray): H x W x 3 rainy image.
        exemplar (Optional[np.ndarray]): Exemplar image; the rainy image
            itself when ``None``.
        params (ParameterStore): Network parameters.
        config (MsgnnConfig): Architecture matching ``params``.

    Returns:
        Tuple[Tensor, Tensor]: ``(background, rain)`` as [3, H, W] tensors with
        ``background = clamp(rainy - rain, 0, 1)``.
    """
    image = as_image(rainy)
    height, width = image.shape[:2]
    if min(height, width) < config.patch_size:
        raise DimensionError(f"image of size {height}x{width} is smaller than patch size {config.patch_size}")
    padded_min = min(height + _pad_amount(height), width + _pad_amount(width))
    factor = max((SCALE_FACTORS[tag] for tag in config.graph_branches if tag in SCALE_FACTORS), default=1)
    if padded_min // factor < config.patch_size:
        raise DimensionError(
            f"image of size {height}x{width} is too small for patch size {config.patch_size} at 1/{factor} scale"
        )
    source = image_to_tensor(image)
    padded = reflect_pad(source, _pad_amount(height), _pad_amount(width))
    other = image_to_tensor(as_image(exemplar)) if exemplar is not None else padded

    slope = config.leaky_slope
    graph_features = graph_branches(padded, other, params, config)

    current = leaky_relu(conv2d(padded, params["head.weight"], params["head.bias"], padding=1), slope)
    outputs: List[Tensor] = []
    for i in range(config.n_subnets):
        if i > 0:
            current = fusion_connection(outputs, params.scope(f"fusions.{i}")) if config.use_fusion else outputs[-1]
        if config.use_graph:
            current = graph_inject(current, graph_features, params.scope(f"injections.{i}"), slope, config.inject_stride)
        for j in range(config.n_blocks):
            current = ct_res_block(current, params.scope(f"subnets.{i}.blocks.{j}"), config.attention_variant, slope)
        outputs.append(current)

    rain = conv2d(outputs[-1], params["tail.weight"], params["tail.bias"], padding=1)
    background = clamp(padded - rain, 0.0, 1.0)
    return crop(background, height, width), crop(rain, height, width)


def derain_image(
    rainy: np.ndarray,
    exemplar: Optional[np.ndarray],
    params: ParameterStore,
    config: MsgnnConfig,
) -> Tuple[np.ndarray, np.ndarray]:
    """Inference-only forward pass returning ``(background, rain)`` images."""
    with no_grad():
        background, rain = forward(rainy, exemplar, params, config)
    residual = np.transpose(rain.data, (1, 2, 0)).astype(np.float32)
    return tensor_to_image(background), residual
