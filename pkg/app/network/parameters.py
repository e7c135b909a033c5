"""Named parameter tensors of the network: layout, initialization and counts."""

import logging
from typing import Dict, Iterator, List, Mapping, Tuple

import numpy as np
import pandas as pd

from ..errors import CheckpointError
from ..graph import attention_shapes, feature_shapes
from ..models.network import AttentionVariant, MsgnnConfig
from ..tensor import Tensor, parameter

logger = logging.getLogger(__name__)

Shape = Tuple[int, ...]


def _conv(name: str, c_out: int, c_in: int, kernel: int) -> Dict[str, Shape]:
    return {f"{name}.weight": (c_out, c_in, kernel, kernel), f"{name}.bias": (c_out,)}


def _prefixed(prefix: str, shapes: Mapping[str, Shape]) -> Dict[str, Shape]:
    return {f"{prefix}.{name}": shape for name, shape in shapes.items()}


def parameter_shapes(config: MsgnnConfig) -> Dict[str, Shape]:
    """Every trainable tensor of ``config`` in a fixed order.

    Groups: ``head``, ``features``/``attention`` (graph model, shared by all
    branches), ``subnets``, ``fusions``, ``injections`` and ``tail``.
    """
    channels = config.channels
    shapes: Dict[str, Shape] = {}
    shapes.update(_conv("head", channels, 3, 3))

    branches = config.graph_branches
    if branches:
        shapes.update(_prefixed("features", feature_shapes(channels)))
        shapes.update(_prefixed("attention", attention_shapes(channels)))

    for i in range(config.n_subnets):
        for j in range(config.n_blocks):
            block = f"subnets.{i}.blocks.{j}"
            shapes.update(_conv(f"{block}.conv_a", channels, channels, 3))
            shapes.update(_conv(f"{block}.conv_b", channels, channels, 3))
            if config.attention_variant != AttentionVariant.NONE:
                shapes.update(_conv(f"{block}.gate.fc1", config.gate_hidden, channels, 1))
                shapes.update(_conv(f"{block}.gate.fc2", channels, config.gate_hidden, 1))

    if config.use_fusion:
        for i in range(1, config.n_subnets):
            shapes.update(_conv(f"fusions.{i}", channels, i * channels, 1))

    if config.use_graph:
        inject_in = channels * (1 + len(branches))
        for i in range(config.n_subnets):
            shapes.update(_conv(f"injections.{i}.conv1", channels, inject_in, 5))
            shapes.update(_conv(f"injections.{i}.conv2", channels, channels, 5))

    shapes.update(_conv("tail", 3, channels, 3))
    return shapes


def param_count(config: MsgnnConfig) -> int:
    """Exact number of trainable scalars."""
    return int(sum(int(np.prod(shape)) for shape in parameter_shapes(config).values()))


def param_breakdown(config: MsgnnConfig) -> pd.DataFrame:
    """Scalar counts per top-level parameter group, in layout order."""
    rows = [
        {"group": name.split(".", 1)[0], "params": int(np.prod(shape))}
        for name, shape in parameter_shapes(config).items()
    ]
    frame = pd.DataFrame(rows)
    return frame.groupby("group", sort=False, as_index=False)["params"].sum()


def _fan_in(shape: Shape) -> int:
    return int(np.prod(shape[1:]))


class ParameterStore:
    """Ordered mapping from parameter name to leaf tensor."""

    def __init__(self, tensors: Dict[str, Tensor]):
        self._tensors = dict(tensors)

    @classmethod
    def initialize(cls, config: MsgnnConfig, zero_tail: bool = False) -> "ParameterStore":
        """Uniform fan-in scaled weights and zero biases, seeded by ``config.seed``.

        Weights are drawn from ``U(-b, b)`` with
        ``b = sqrt(2 / (1 + slope**2)) * sqrt(3 / fan_in)``.
        """
        rng = np.random.default_rng(config.seed)
        gain = np.sqrt(2.0 / (1.0 + config.leaky_slope**2))
        tensors: Dict[str, Tensor] = {}
        for name, shape in parameter_shapes(config).items():
            if name.endswith(".bias") or (zero_tail and name.startswith("tail.")):
                data = np.zeros(shape)
            else:
                bound = gain * np.sqrt(3.0 / _fan_in(shape))
                data = rng.uniform(-bound, bound, size=shape)
            tensors[name] = parameter(data, name=name)
        store = cls(tensors)
        logger.info(f"Initialized {store.count()} parameters in {len(store)} tensors (seed {config.seed})")
        return store

    @classmethod
    def from_arrays(cls, arrays: Mapping[str, np.ndarray], config: MsgnnConfig) -> "ParameterStore":
        """Build a store from named arrays, checking names and shapes.

        Raises:
            CheckpointError: A tensor is missing, unexpected or misshaped.
        """
        expected = parameter_shapes(config)
        for name in arrays:
            if name not in expected:
                raise CheckpointError(f"unexpected parameter '{name}' for this configuration")
        tensors: Dict[str, Tensor] = {}
        for name, shape in expected.items():
            if name not in arrays:
                raise CheckpointError(f"missing parameter '{name}'")
            if tuple(arrays[name].shape) != shape:
                raise CheckpointError(
                    f"parameter '{name}' has shape {tuple(arrays[name].shape)}, expected {shape}"
                )
            tensors[name] = parameter(arrays[name], name=name)
        return cls(tensors)

    def __getitem__(self, name: str) -> Tensor:
        return self._tensors[name]

    def __contains__(self, name: object) -> bool:
        return name in self._tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def names(self) -> List[str]:
        return list(self._tensors)

    def items(self) -> List[Tuple[str, Tensor]]:
        return list(self._tensors.items())

    def tensors(self) -> List[Tensor]:
        return list(self._tensors.values())

    def scope(self, prefix: str) -> Dict[str, Tensor]:
        """Tensors under ``prefix.``, keyed by the rest of their name."""
        head = f"{prefix}."
        return {name[len(head):]: tensor for name, tensor in self._tensors.items() if name.startswith(head)}

    def count(self) -> int:
        return int(sum(tensor.size for tensor in self._tensors.values()))

    def arrays(self) -> Dict[str, np.ndarray]:
        """Copies of the current values."""
        return {name: tensor.data.copy() for name, tensor in self._tensors.items()}
