"""Relating an input's features to another image through the patch graph."""

import logging
from typing import Optional

from ..models.network import ScaleTag
from ..tensor import Tensor
from .attention import attentional_aggregate
from .features import FeatureMap, Params, extract_features
from .knn import knn_search
from .patches import img2patch, patch2img

logger = logging.getLogger(__name__)


def graph_relate(
    query_features: FeatureMap,
    other: Tensor,
    feature_params: Params,
    attention_params: Params,
    k: int,
    size: int,
    stride: int,
    scale_tag: ScaleTag,
    slope: float = 0.2,
    other_features: Optional[FeatureMap] = None,
) -> FeatureMap:
    """Aggregate, for every patch of the input features, its nearest patches
    in ``other``.

    Args:
        query_features (FeatureMap): Features of the full-scale input.
        other (Tensor): [3, h, w] image the input is related to: the input
            itself, a downsampled copy or an exemplar.
        feature_params (Params): Shared extractor parameters.
        attention_params (Params): Shared logit network parameters.
        k (int): Neighbors per patch; clamped to the key patch count.
        size (int): Patch side length.
        stride (int): Patch stride.
        scale_tag (ScaleTag): Tag of ``other``.
        slope (float): LeakyReLU negative slope.
        other_features (Optional[FeatureMap]): Precomputed features of
            ``other``, reused when ``other`` is the input itself.

    Returns:
        FeatureMap: Aggregated features at the input's spatial size.
    """
    if other_features is None:
        other_features = extract_features(other, feature_params, scale_tag, slope)
    query = img2patch(query_features, size, stride)
    key = img2patch(other_features, size, stride)

    neighbors = k
    if k > key.count:
        logger.warning(f"k={k} exceeds the {key.count} {scale_tag.value} patches; using k={key.count}")
        neighbors = key.count

    graph = knn_search(query, key, neighbors)
    aggregated = attentional_aggregate(graph, query, key, attention_params, slope)
    return patch2img(aggregated, scale_tag)
