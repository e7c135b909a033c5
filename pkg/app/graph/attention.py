"""Attention weights and weighted aggregation over a k-NN graph."""

import logging
from typing import Dict, Tuple

import numpy as np

from ..errors import DimensionError
from ..tensor import Tensor, conv2d, exp, leaky_relu, mean, reshape, take, weighted_average
from .features import Params
from .knn import KnnGraph
from .patches import PatchSet

logger = logging.getLogger(__name__)


def attention_shapes(channels: int) -> Dict[str, Tuple[int, ...]]:
    """Parameter shapes of the two-layer logit network."""
    return {
        "conv1.weight": (channels, channels, 3, 3),
        "conv1.bias": (channels,),
        "conv2.weight": (1, channels, 3, 3),
        "conv2.bias": (1,),
    }


def attention_logit(difference: Tensor, params: Params, slope: float = 0.2) -> Tensor:
    """Scalar logit for a [C, l, l] patch difference, or one per row of a
    batched [B, C, l, l] input."""
    hidden = leaky_relu(conv2d(difference, params["conv1.weight"], params["conv1.bias"], padding=1), slope)
    score = conv2d(hidden, params["conv2.weight"], params["conv2.bias"], padding=1)
    if difference.ndim == 4:
        return mean(score, axis=(1, 2, 3))
    return mean(score)


def _check_graph(graph: KnnGraph, query: PatchSet, key: PatchSet) -> None:
    if graph.query_count != query.count:
        raise DimensionError(f"graph has {graph.query_count} query rows but query set has {query.count} patches")
    if query.length != key.length or query.geometry.size != key.geometry.size:
        raise DimensionError(
            f"query patches ({query.geometry.channels}x{query.geometry.size}x{query.geometry.size}) and key patches "
            f"({key.geometry.channels}x{key.geometry.size}x{key.geometry.size}) differ"
        )
    if graph.neighbors.size and graph.neighbors.max() >= key.count:
        raise DimensionError(f"graph references key index {graph.neighbors.max()} beyond {key.count} key patches")


def _gather(graph: KnnGraph, query: PatchSet, key: PatchSet) -> Tuple[Tensor, Tensor]:
    rows = np.repeat(np.arange(graph.query_count), graph.k)
    return take(query.patches, rows), take(key.patches, graph.neighbors.ravel())


def attention_weights(
    graph: KnnGraph,
    query: PatchSet,
    key: PatchSet,
    params: Params,
    slope: float = 0.2,
) -> Tensor:
    """Positive weights [Q, k] of every graph edge, scaled so each row peaks at 1."""
    _check_graph(graph, query, key)
    query_rows, neighbor_rows = _gather(graph, query, key)
    return _edge_weights(graph, query, query_rows - neighbor_rows, params, slope)


def _edge_weights(graph: KnnGraph, query: PatchSet, differences: Tensor, params: Params, slope: float) -> Tensor:
    geometry = query.geometry
    batch = reshape(differences, (graph.query_count * graph.k, geometry.channels, geometry.size, geometry.size))
    logits = reshape(attention_logit(batch, params, slope), (graph.query_count, graph.k))
    # Normalization cancels a per-row shift.
    shift = Tensor(np.broadcast_to(logits.data.max(axis=1, keepdims=True), logits.shape))
    return exp(logits - shift)


def attentional_aggregate(
    graph: KnnGraph,
    query: PatchSet,
    key: PatchSet,
    params: Params,
    slope: float = 0.2,
) -> PatchSet:
    """Replace every query patch by the attention-weighted mean of its neighbors.

    For query ``q`` with neighbors ``n``: the difference ``P_q - P_n`` is
    scored by the logit network, ``alpha = exp(logit)``, and the output is
    ``sum(alpha * P_n) / sum(alpha)``. The result keeps the query geometry.

    Raises:
        DimensionError: The graph does not belong to these patch sets.
    """
    _check_graph(graph, query, key)
    query_rows, neighbor_rows = _gather(graph, query, key)
    alpha = _edge_weights(graph, query, query_rows - neighbor_rows, params, slope)
    values = reshape(neighbor_rows, (graph.query_count, graph.k, key.length))
    return PatchSet(patches=weighted_average(alpha, values), geometry=query.geometry, scale_tag=key.scale_tag)
