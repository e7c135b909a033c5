"""The MSGNN backbone and its parameters."""

from .blocks import channel_gate, ct_res_block, fusion_connection, graph_inject
from .msgnn import derain_image, forward, graph_branches
from .parameters import ParameterStore, param_breakdown, param_count, parameter_shapes

__all__ = [
    "ParameterStore",
    "channel_gate",
    "ct_res_block",
    "derain_image",
    "forward",
    "fusion_connection",
    "graph_branches",
    "graph_inject",
    "param_breakdown",
    "param_count",
    "parameter_shapes",
]
