"""Patch graph: features, patches, k-NN search and attentional aggregation."""

from .attention import attention_logit, attention_shapes, attention_weights, attentional_aggregate
from .features import FeatureMap, Params, extract_features, feature_shapes
from .knn import KnnGraph, knn_search
from .patches import PatchGeometry, PatchSet, img2patch, patch2img
from .relate import graph_relate

__all__ = [
    "FeatureMap",
    "KnnGraph",
    "Params",
    "PatchGeometry",
    "PatchSet",
    "attention_logit",
    "attention_shapes",
    "attention_weights",
    "attentional_aggregate",
    "extract_features",
    "feature_shapes",
    "graph_relate",
    "img2patch",
    "knn_search",
    "patch2img",
]
