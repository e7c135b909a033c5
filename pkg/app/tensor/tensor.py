"""Dense tensors with a reverse-mode gradient tape."""

import logging
import threading
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ContractError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, float, int, Sequence[float], Sequence[Sequence[float]]]

_state = threading.local()


def get_default_dtype() -> type:
    """Floating point type new tensors are created with on this thread."""
    return getattr(_state, "dtype", np.float32)


def is_grad_enabled() -> bool:
    """Whether operations on this thread record onto the tape."""
    return getattr(_state, "grad_enabled", True)


@contextmanager
def precision(dtype: type) -> Iterator[None]:
    """Create tensors in ``dtype`` for the duration of the block.

    Training runs in float32; finite-difference checks re-execute in float64.
    """
    previous = get_default_dtype()
    _state.dtype = dtype
    try:
        yield
    finally:
        _state.dtype = previous


@contextmanager
def no_grad() -> Iterator[None]:
    """Run operations without recording them for backward."""
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


class Function:
    """A differentiable operation recorded on the tape.

    Subclasses implement ``forward`` on raw arrays and ``backward`` returning one
    gradient (or None) per input tensor.
    """

    def __init__(self, *parents: "Tensor"):
        self.parents = parents

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no forward pass")

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError(f"{type(self).__name__} has no backward pass")

    @classmethod
    def apply(cls, *tensors: "Tensor", **kwargs: Any) -> "Tensor":
        """Run the forward pass and, when needed, attach the node to the tape."""
        func = cls(*tensors)
        out_data = func.forward(*(t.data for t in tensors), **kwargs)
        requires_grad = is_grad_enabled() and any(t.requires_grad for t in tensors)
        if not requires_grad:
            return Tensor(out_data)
        return Tensor(out_data, requires_grad=True, creator=func)


class Tensor:
    """A row-major float array that may participate in gradient computation.

    Tensors hash by identity, so they can key a ``GradientMap`` directly.
    """

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        name: Optional[str] = None,
        creator: Optional[Function] = None,
    ):
        self.data = np.ascontiguousarray(np.asarray(data, dtype=get_default_dtype()))
        self.requires_grad = requires_grad
        self.name = name
        self.creator = creator

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def tape_id(self) -> Optional[int]:
        """Handle of the tape node that produced this tensor, if any."""
        return id(self.creator) if self.creator is not None else None

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() needs a single element, tensor has shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def __repr__(self) -> str:
        label = f" name={self.name}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad}{label})"

    def __add__(self, other: Union["Tensor", float]) -> "Tensor":
        from . import ops
        return ops.add(self, other)

    def __radd__(self, other: float) -> "Tensor":
        from . import ops
        return ops.add(other, self)

    def __sub__(self, other: Union["Tensor", float]) -> "Tensor":
        from . import ops
        return ops.sub(self, other)

    def __rsub__(self, other: float) -> "Tensor":
        from . import ops
        return ops.sub(other, self)

    def __mul__(self, other: Union["Tensor", float]) -> "Tensor":
        from . import ops
        return ops.mul(self, other)

    def __rmul__(self, other: float) -> "Tensor":
        from . import ops
        return ops.mul(other, self)

    def __truediv__(self, other: Union["Tensor", float]) -> "Tensor":
        from . import ops
        return ops.div(self, other)

    def __neg__(self) -> "Tensor":
        from . import ops
        return ops.scalar_mul(self, -1.0)


def parameter(data: ArrayLike, name: Optional[str] = None) -> Tensor:
    """Create a trainable leaf tensor."""
    return Tensor(data, requires_grad=True, name=name)


class GradientMap(Dict[Tensor, Tensor]):
    """Gradients keyed by the parameter tensors they belong to."""

    def array(self, param: Tensor) -> np.ndarray:
        """Gradient of ``param`` as an array, zeros when it was unreachable."""
        grad = self.get(param)
        if grad is None:
            return np.zeros_like(param.data)
        return grad.data


def _topological_order(root: Tensor) -> List[Tensor]:
    order: List[Tensor] = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        if node.creator is not None:
            for parent in node.creator.parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
    return order


def backward(loss: Tensor) -> GradientMap:
    """Compute gradients of a scalar loss for every trainable leaf it depends on.

    The tape below ``loss`` is consumed: intermediate tensors are detached
    once their gradients have been propagated.
    """
    if loss.size != 1:
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")

    result = GradientMap()
    if not loss.requires_grad:
        return result

    order = _topological_order(loss)
    grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(order):
        grad = grads.pop(id(node), None)
        if grad is None:
            continue
        if node.creator is None:
            result[node] = Tensor(grad.reshape(node.shape))
            continue
        for parent, parent_grad in zip(node.creator.parents, node.creator.backward(grad)):
            if parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in grads:
                # A tensor used at several sites sums its gradients.
                grads[key] = grads[key] + parent_grad
            else:
                grads[key] = parent_grad

    for node in order:
        if node.creator is not None:
            node.creator = None
            node.requires_grad = False
    return result
