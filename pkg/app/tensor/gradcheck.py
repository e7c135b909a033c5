"""Central finite-difference gradient checking."""

import logging
from typing import Callable, List, Sequence

import numpy as np

from ..errors import ContractError
from .tensor import Tensor, backward, no_grad, precision

logger = logging.getLogger(__name__)

TensorFunction = Callable[[Sequence[Tensor]], Tensor]


def finite_diff_check(
    f: TensorFunction,
    params: Sequence[Tensor],
    eps: float = 1e-3,
    max_elements: int = 200,
    seed: int = 0,
    floor: float = 1e-8,
) -> float:
    """Worst relative error between analytic and central-difference gradients.

    ``f`` receives float64 copies of ``params`` (in the same order) and must
    return a scalar tensor. Parameters larger than ``max_elements`` are checked
    on a seeded random subsample. The relative error of one element is
    ``|a - n| / max(|a|, |n|, floor)``.

    Args:
        f: Deterministic function of the parameters.
        params: Tensors to differentiate with respect to.
        eps: Central-difference step.
        max_elements: Elements checked per parameter.
        seed: Seed of the subsample.
        floor: Lower bound of the relative-error denominator.

    Returns:
        float: Maximum relative error over every checked element.
    """
    if eps <= 0:
        raise ContractError(f"finite_diff_check eps must be positive, got {eps}")

    rng = np.random.default_rng(seed)
    worst = 0.0
    with precision(np.float64):
        copies: List[Tensor] = [
            Tensor(p.data.astype(np.float64), requires_grad=True, name=p.name) for p in params
        ]
        grads = backward(f(copies))
        analytic = [grads.array(c).astype(np.float64).reshape(-1) for c in copies]

        for copy, expected in zip(copies, analytic):
            flat = copy.data.reshape(-1)
            if flat.size <= max_elements:
                positions = np.arange(flat.size)
            else:
                positions = np.sort(rng.choice(flat.size, size=max_elements, replace=False))
            for position in positions:
                original = flat[position]
                with no_grad():
                    flat[position] = original + eps
                    plus = f(copies).item()
                    flat[position] = original - eps
                    minus = f(copies).item()
                flat[position] = original
                numeric = (plus - minus) / (2 * eps)
                denominator = max(abs(expected[position]), abs(numeric), floor)
                worst = max(worst, abs(expected[position] - numeric) / denominator)

    logger.debug(f"finite_diff_check over {len(params)} parameters: max relative error {worst:.3e}")
    return worst
