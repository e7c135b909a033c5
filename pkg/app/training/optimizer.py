"""ADAM over a parameter store."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from ..errors import ContractError, DimensionError
from ..network.parameters import ParameterStore
from ..tensor import GradientMap

logger = logging.getLogger(__name__)


@dataclass
class OptimizerState:
    """First and second moments per parameter name, plus the step counter.

    Moments share their parameter's dtype so a float32 checkpoint restores
    them exactly.
    """

    first: Dict[str, np.ndarray] = field(default_factory=dict)
    second: Dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0

    @classmethod
    def zeros(cls, params: ParameterStore) -> "OptimizerState":
        return cls(
            first={name: np.zeros_like(t.data) for name, t in params.items()},
            second={name: np.zeros_like(t.data) for name, t in params.items()},
        )

    @classmethod
    def restore(
        cls,
        params: ParameterStore,
        first: Mapping[str, np.ndarray],
        second: Mapping[str, np.ndarray],
        step: int,
    ) -> "OptimizerState":
        """Rebuild saved moments; parameters without saved moments start at zero."""
        state = cls.zeros(params)
        for target, saved in ((state.first, first), (state.second, second)):
            for name, array in saved.items():
                if name not in target:
                    raise ContractError(f"optimizer moment for unknown parameter '{name}'")
                if array.shape != target[name].shape:
                    raise DimensionError(f"optimizer moment for '{name}' has shape {array.shape}, expected {target[name].shape}")
                target[name] = array.astype(target[name].dtype)
        state.step = step
        return state


def adam_step(
    params: ParameterStore,
    grads: GradientMap,
    state: OptimizerState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> OptimizerState:
    """Apply one bias-corrected ADAM update in place.

    Raises:
        ContractError: A trainable parameter has no gradient.
    """
    for name, tensor in params.items():
        if tensor not in grads:
            raise ContractError(f"no gradient for trainable parameter '{name}'")

    state.step += 1
    correction1 = 1.0 - beta1**state.step
    correction2 = 1.0 - beta2**state.step
    for name, tensor in params.items():
        grad = grads[tensor].data.astype(tensor.data.dtype)
        m = state.first.setdefault(name, np.zeros_like(tensor.data))
        v = state.second.setdefault(name, np.zeros_like(tensor.data))
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * grad * grad
        update = lr * (m / correction1) / (np.sqrt(v / correction2) + eps)
        tensor.data -= update.astype(tensor.data.dtype)
    return state
