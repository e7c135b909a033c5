"""Differentiable tensor operations.

Broadcasting is limited to identical shapes and single-element (scalar)
operands; anything else raises ``DimensionError``.
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ContractError, DimensionError
from .tensor import Function, Tensor

logger = logging.getLogger(__name__)

Operand = Union[Tensor, float, int]
Axis = Optional[Union[int, Tuple[int, ...]]]


def _as_tensor(value: Operand) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _check_broadcast(a: np.ndarray, b: np.ndarray, op: str) -> None:
    if a.shape == b.shape or a.size == 1 or b.size == 1:
        return
    raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} differ and neither is a scalar")


def _reduce_to(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    if grad.shape == shape:
        return grad
    return np.asarray(grad.sum()).reshape(shape)


# Elementwise arithmetic

class _Add(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_broadcast(a, b, "add")
        self.shapes = (a.shape, b.shape)
        return a + b

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return _reduce_to(grad, self.shapes[0]), _reduce_to(grad, self.shapes[1])


class _Sub(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_broadcast(a, b, "sub")
        self.shapes = (a.shape, b.shape)
        return a - b

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return _reduce_to(grad, self.shapes[0]), _reduce_to(-grad, self.shapes[1])


class _Mul(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_broadcast(a, b, "mul")
        self.a, self.b = a, b
        return a * b

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return _reduce_to(grad * self.b, self.a.shape), _reduce_to(grad * self.a, self.b.shape)


class _Div(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _check_broadcast(a, b, "div")
        self.a, self.b = a, b
        return a / b

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        grad_a = grad / self.b
        grad_b = -grad * self.a / (self.b * self.b)
        return _reduce_to(grad_a, self.a.shape), _reduce_to(grad_b, self.b.shape)


class _ScalarMul(Function):
    def forward(self, x: np.ndarray, factor: float) -> np.ndarray:
        self.factor = factor
        return x * x.dtype.type(factor)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        return (grad * grad.dtype.type(self.factor),)


class _Exp(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.out = np.exp(x)
        return self.out

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        return (grad * self.out,)


class _Sigmoid(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        half = x.dtype.type(0.5)
        self.out = half * (np.tanh(half * x) + 1)
        return self.out

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        return (grad * self.out * (1 - self.out),)


class _LeakyRelu(Function):
    def forward(self, x: np.ndarray, slope: float) -> np.ndarray:
        self.mask = x >= 0
        self.slope = x.dtype.type(slope)
        return np.where(self.mask, x, x * self.slope)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        return (np.where(self.mask, grad, grad * self.slope),)


class _Relu(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.mask = x > 0
        return np.where(self.mask, x, 0).astype(x.dtype)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        return (np.where(self.mask, grad, 0).astype(grad.dtype),)


class _Clamp(Function):
    def forward(self, x: np.ndarray, low: float, high: float) -> np.ndarray:
        self.mask = (x >= low) & (x <= high)
        return np.clip(x, low, high)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        return (np.where(self.mask, grad, 0).astype(grad.dtype),)


def add(a: Operand, b: Operand) -> Tensor:
    return _Add.apply(_as_tensor(a), _as_tensor(b))


def sub(a: Operand, b: Operand) -> Tensor:
    return _Sub.apply(_as_tensor(a), _as_tensor(b))


def mul(a: Operand, b: Operand) -> Tensor:
    return _Mul.apply(_as_tensor(a), _as_tensor(b))


def div(a: Operand, b: Operand) -> Tensor:
    return _Div.apply(_as_tensor(a), _as_tensor(b))


def scalar_mul(x: Tensor, factor: float) -> Tensor:
    return _ScalarMul.apply(x, factor=factor)


def exp(x: Tensor) -> Tensor:
    return _Exp.apply(x)


def sigmoid(x: Tensor) -> Tensor:
    return _Sigmoid.apply(x)


def leaky_relu(x: Tensor, slope: float) -> Tensor:
    """y = x for x >= 0, slope * x otherwise."""
    if not 0 < slope < 1:
        raise ContractError(f"leaky_relu slope must lie in (0, 1), got {slope}")
    return _LeakyRelu.apply(x, slope=slope)


def relu(x: Tensor) -> Tensor:
    return _Relu.apply(x)


def clamp(x: Tensor, low: float, high: float) -> Tensor:
    return _Clamp.apply(x, low=low, high=high)


# Reductions and reshaping

def _normalize_axis(axis: Axis, ndim: int) -> Optional[Tuple[int, ...]]:
    if axis is None:
        return None
    axes = (axis,) if isinstance(axis, int) else tuple(axis)
    return tuple(a % ndim for a in axes)


class _Sum(Function):
    def forward(self, x: np.ndarray, axis: Optional[Tuple[int, ...]], keepdims: bool) -> np.ndarray:
        self.shape, self.axis, self.keepdims = x.shape, axis, keepdims
        return np.sum(x, axis=axis, keepdims=keepdims)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        if self.axis is not None and not self.keepdims:
            grad = np.expand_dims(grad, self.axis)
        return (np.broadcast_to(grad, self.shape).copy(),)


class _Mean(Function):
    def forward(self, x: np.ndarray, axis: Optional[Tuple[int, ...]], keepdims: bool) -> np.ndarray:
        self.shape, self.axis, self.keepdims = x.shape, axis, keepdims
        self.count = x.size if axis is None else int(np.prod([x.shape[a] for a in axis]))
        return np.mean(x, axis=axis, keepdims=keepdims)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        if self.axis is not None and not self.keepdims:
            grad = np.expand_dims(grad, self.axis)
        return (np.broadcast_to(grad / grad.dtype.type(self.count), self.shape).copy(),)


class _Reshape(Function):
    def forward(self, x: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
        self.shape = x.shape
        return x.reshape(shape)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        return (grad.reshape(self.shape),)


class _Concat(Function):
    def forward(self, *arrays: np.ndarray, axis: int) -> np.ndarray:
        self.axis = axis
        self.bounds = np.cumsum([a.shape[axis] for a in arrays])[:-1]
        return np.concatenate(arrays, axis=axis)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray, ...]:
        return tuple(np.ascontiguousarray(g) for g in np.split(grad, self.bounds, axis=self.axis))


class _Slice(Function):
    def forward(self, x: np.ndarray, axis: int, start: int, stop: int) -> np.ndarray:
        self.shape = x.shape
        self.index = (slice(None),) * axis + (slice(start, stop),)
        return x[self.index].copy()

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        out = np.zeros(self.shape, dtype=grad.dtype)
        out[self.index] = grad
        return (out,)


class _Take(Function):
    def forward(self, x: np.ndarray, indices: np.ndarray, axis: int) -> np.ndarray:
        self.shape, self.indices, self.axis = x.shape, indices, axis
        return np.take(x, indices, axis=axis)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        out = np.zeros(self.shape, dtype=grad.dtype)
        np.add.at(out, (slice(None),) * self.axis + (self.indices,), grad)
        return (out,)


def sum(x: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    return _Sum.apply(x, axis=_normalize_axis(axis, x.ndim), keepdims=keepdims)


def mean(x: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:
    return _Mean.apply(x, axis=_normalize_axis(axis, x.ndim), keepdims=keepdims)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    shape = tuple(int(d) for d in shape)
    if int(np.prod(shape)) != x.size:
        raise DimensionError(f"reshape: cannot view {x.shape} as {shape}")
    return _Reshape.apply(x, shape=shape)


def concat(tensors: Sequence[Tensor], axis: int) -> Tensor:
    if not tensors:
        raise ContractError("concat needs at least one tensor")
    ndim = tensors[0].ndim
    axis %= ndim
    reference = tensors[0].shape
    for position, tensor in enumerate(tensors[1:], start=1):
        if tensor.ndim != ndim:
            raise DimensionError(f"concat: input {position} has rank {tensor.ndim}, expected {ndim}")
        for dim in range(ndim):
            if dim != axis and tensor.shape[dim] != reference[dim]:
                raise DimensionError(
                    f"concat: input {position} has size {tensor.shape[dim]} on axis {dim}, "
                    f"expected {reference[dim]}"
                )
    if len(tensors) == 1:
        return tensors[0]
    return _Concat.apply(*tensors, axis=axis)


def concat_channels(tensors: Sequence[Tensor]) -> Tensor:
    """Concatenate [C_i, H, W] tensors along the channel axis in argument order."""
    for position, tensor in enumerate(tensors):
        if tensor.ndim != 3:
            raise DimensionError(f"concat_channels: input {position} has shape {tensor.shape}, expected [C,H,W]")
    return concat(tensors, axis=0)


def slice_axis(x: Tensor, axis: int, start: int, stop: int) -> Tensor:
    axis %= x.ndim
    if not 0 <= start <= stop <= x.shape[axis]:
        raise DimensionError(f"slice: [{start}:{stop}] out of range for axis {axis} of size {x.shape[axis]}")
    return _Slice.apply(x, axis=axis, start=start, stop=stop)


def slice_channels(x: Tensor, start: int, stop: int) -> Tensor:
    return slice_axis(x, 0, start, stop)


def take(x: Tensor, indices: np.ndarray, axis: int = 0) -> Tensor:
    """Gather along ``axis``; indices are constants on the tape."""
    axis %= x.ndim
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size and (indices.min() < 0 or indices.max() >= x.shape[axis]):
        raise DimensionError(f"take: index out of range for axis {axis} of size {x.shape[axis]}")
    return _Take.apply(x, indices=indices, axis=axis)


def reflect_pad(x: Tensor, bottom: int, right: int) -> Tensor:
    """Reflection-pad the last two axes at the bottom and right edges."""
    if bottom == 0 and right == 0:
        return x
    height, width = x.shape[-2:]
    rows = np.pad(np.arange(height), (0, bottom), mode="reflect") if height > 1 else np.zeros(height + bottom, dtype=np.int64)
    cols = np.pad(np.arange(width), (0, right), mode="reflect") if width > 1 else np.zeros(width + right, dtype=np.int64)
    out = take(x, rows, axis=x.ndim - 2) if bottom else x
    return take(out, cols, axis=x.ndim - 1) if right else out


def crop(x: Tensor, height: int, width: int) -> Tensor:
    """Keep the top-left ``height`` x ``width`` window of the last two axes."""
    out = x
    if x.shape[-2] != height:
        out = slice_axis(out, x.ndim - 2, 0, height)
    if x.shape[-1] != width:
        out = slice_axis(out, x.ndim - 1, 0, width)
    return out


# Convolution and resampling

class _Conv2d(Function):
    def forward(self, x: np.ndarray, weight: np.ndarray, bias: np.ndarray, stride: int, padding: int) -> np.ndarray:
        self.stride, self.padding = stride, padding
        self.input_shape = x.shape
        self.weight = weight
        kh, kw = weight.shape[2:]
        xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding))) if padding else x
        self.padded_shape = xp.shape
        self.cols = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
        out = np.tensordot(self.cols, weight, axes=([1, 4, 5], [1, 2, 3]))
        return np.ascontiguousarray(out.transpose(0, 3, 1, 2)) + bias[None, :, None, None]

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        kh, kw = self.weight.shape[2:]
        out_h, out_w = grad.shape[2:]
        s, p = self.stride, self.padding
        grad_weight = np.tensordot(grad, self.cols, axes=([0, 2, 3], [0, 2, 3]))
        grad_bias = grad.sum(axis=(0, 2, 3))
        grad_padded = np.zeros(self.padded_shape, dtype=grad.dtype)
        for i in range(kh):
            for j in range(kw):
                contribution = np.tensordot(grad, self.weight[:, :, i, j], axes=([1], [0]))
                grad_padded[:, :, i:i + s * (out_h - 1) + 1:s, j:j + s * (out_w - 1) + 1:s] += contribution.transpose(0, 3, 1, 2)
        height, width = self.input_shape[2:]
        grad_input = grad_padded[:, :, p:p + height, p:p + width]
        return np.ascontiguousarray(grad_input), grad_weight, grad_bias


def conv2d(
    input: Tensor,  # noqa: A002
    weight: Tensor,
    bias: Optional[Tensor] = None,
    stride: int = 1,
    padding: int = 0,
) -> Tensor:
    """2-D cross-correlation with zero padding.

    Accepts [C_in, H, W] or batched [N, C_in, H, W] input and a
    [C_out, C_in, kh, kw] weight. Output sizes must be exact:
    (H + 2 * padding - kh) must be divisible by ``stride``.
    """
    if stride < 1:
        raise ContractError(f"conv2d stride must be >= 1, got {stride}")
    if padding < 0:
        raise ContractError(f"conv2d padding must be >= 0, got {padding}")
    if weight.ndim != 4:
        raise DimensionError(f"conv2d: weight must be [C_out, C_in, kh, kw], got shape {weight.shape}")
    batched = input.ndim == 4
    if input.ndim not in (3, 4):
        raise DimensionError(f"conv2d: input must be [C, H, W] or [N, C, H, W], got shape {input.shape}")

    c_out, c_in, kh, kw = weight.shape
    channels, height, width = input.shape[-3:]
    if channels != c_in:
        raise DimensionError(
            f"conv2d: input channel axis has {channels} channels but weight C_in axis expects {c_in}"
        )
    for axis_name, size, kernel in (("H", height, kh), ("W", width, kw)):
        span = size + 2 * padding - kernel
        if span < 0:
            raise DimensionError(
                f"conv2d: kernel {kernel} does not fit padded {axis_name} axis of size {size + 2 * padding}"
            )
        if span % stride:
            raise DimensionError(
                f"conv2d: {axis_name} axis of size {size} with padding {padding}, kernel {kernel} "
                f"and stride {stride} gives a fractional output size"
            )
    if bias is None:
        bias = Tensor(np.zeros(c_out))
    elif bias.shape != (c_out,):
        raise DimensionError(f"conv2d: bias shape {bias.shape} does not match C_out axis {c_out}")

    x = input if batched else reshape(input, (1, channels, height, width))
    out = _Conv2d.apply(x, weight, bias, stride=stride, padding=padding)
    if batched:
        return out
    return reshape(out, out.shape[1:])


def _interpolation_matrix(out_size: int, in_size: int) -> np.ndarray:
    """Half-pixel (align_corners=False) linear interpolation weights."""
    matrix = np.zeros((out_size, in_size), dtype=np.float64)
    scale = in_size / out_size
    for out_index in range(out_size):
        source = max((out_index + 0.5) * scale - 0.5, 0.0)
        low = min(int(np.floor(source)), in_size - 1)
        high = min(low + 1, in_size - 1)
        weight = source - low
        matrix[out_index, low] += 1.0 - weight
        matrix[out_index, high] += weight
    return matrix


class _BilinearResize(Function):
    def forward(self, x: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
        self.rows = _interpolation_matrix(out_h, x.shape[-2]).astype(x.dtype)
        self.cols = _interpolation_matrix(out_w, x.shape[-1]).astype(x.dtype)
        return np.matmul(np.matmul(self.rows, x), self.cols.T)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        return (np.matmul(np.matmul(self.rows.T, grad), self.cols),)


def bilinear_resize(input: Tensor, out_h: int, out_w: int) -> Tensor:  # noqa: A002
    """Bilinear resampling of the last two axes with align_corners=False."""
    if out_h < 1 or out_w < 1:
        raise ContractError(f"bilinear_resize target must be at least 1x1, got {out_h}x{out_w}")
    if input.shape[-2:] == (out_h, out_w):
        return input
    return _BilinearResize.apply(input, out_h=out_h, out_w=out_w)


class _ScaleChannels(Function):
    def forward(self, x: np.ndarray, gate: np.ndarray) -> np.ndarray:
        self.x, self.gate_shape = x, gate.shape
        self.gate = gate.reshape(-1, 1, 1)
        return x * self.gate

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        grad_gate = (grad * self.x).sum(axis=(1, 2))
        return grad * self.gate, grad_gate.reshape(self.gate_shape)


def scale_channels(x: Tensor, gate: Tensor) -> Tensor:
    """Multiply each channel of a [C, H, W] tensor by one gate value."""
    if x.ndim != 3 or gate.size != x.shape[0]:
        raise DimensionError(f"scale_channels: gate of shape {gate.shape} does not match channels of {x.shape}")
    return _ScaleChannels.apply(x, gate)


# Patch extraction and reassembly

def _patch_grid(height: int, width: int, size: int, stride: int) -> Tuple[int, int]:
    return (height - size) // stride + 1, (width - size) // stride + 1


def _unfold(x: np.ndarray, size: int, stride: int) -> np.ndarray:
    channels = x.shape[0]
    windows = sliding_window_view(x, (size, size), axis=(1, 2))[:, ::stride, ::stride]
    rows, cols = windows.shape[1:3]
    return np.ascontiguousarray(windows.transpose(1, 2, 0, 3, 4)).reshape(rows * cols, channels * size * size)


def _fold_sum(patches: np.ndarray, shape: Tuple[int, int, int], size: int, stride: int) -> np.ndarray:
    channels, height, width = shape
    rows, cols = _patch_grid(height, width, size, stride)
    blocks = patches.reshape(rows, cols, channels, size, size).transpose(2, 0, 1, 3, 4)
    out = np.zeros(shape, dtype=patches.dtype)
    for i in range(size):
        for j in range(size):
            out[:, i:i + stride * (rows - 1) + 1:stride, j:j + stride * (cols - 1) + 1:stride] += blocks[..., i, j]
    return out


def _coverage(height: int, width: int, size: int, stride: int, dtype: type) -> np.ndarray:
    rows, cols = _patch_grid(height, width, size, stride)
    ones = np.ones((rows * cols, size * size), dtype=dtype)
    return _fold_sum(ones, (1, height, width), size, stride)[0]


class _Unfold(Function):
    def forward(self, x: np.ndarray, size: int, stride: int) -> np.ndarray:
        self.shape, self.size, self.stride = x.shape, size, stride
        return _unfold(x, size, stride)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        return (_fold_sum(grad, self.shape, self.size, self.stride),)


class _Fold(Function):
    def forward(self, patches: np.ndarray, shape: Tuple[int, int, int], size: int, stride: int) -> np.ndarray:
        self.size, self.stride = size, stride
        count = _coverage(shape[1], shape[2], size, stride, patches.dtype)
        self.inverse_count = np.where(count > 0, 1 / np.maximum(count, 1), 0).astype(patches.dtype)
        total = _fold_sum(patches, shape, size, stride)
        return np.where(count > 0, total / np.maximum(count, 1), 0).astype(patches.dtype)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray]:
        return (_unfold(grad * self.inverse_count, self.size, self.stride),)


def unfold_patches(x: Tensor, size: int, stride: int) -> Tensor:
    """Row-major sliding windows of a [C, H, W] tensor as [Q, C*size*size]."""
    if x.ndim != 3:
        raise DimensionError(f"unfold_patches: expected [C, H, W], got shape {x.shape}")
    return _Unfold.apply(x, size=size, stride=stride)


def fold_patches(patches: Tensor, shape: Tuple[int, int, int], size: int, stride: int) -> Tensor:
    """Scatter patches back to [C, H, W], averaging overlaps by coverage."""
    return _Fold.apply(patches, shape=tuple(shape), size=size, stride=stride)


# Attention-weighted averaging

class _WeightedAverage(Function):
    def forward(self, alpha: np.ndarray, values: np.ndarray) -> np.ndarray:
        self.delta = alpha.sum(axis=1, keepdims=True)
        self.weights = alpha / self.delta
        self.values = values
        return np.einsum("qk,qkd->qd", self.weights, values)

    def backward(self, grad: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        grad_values = self.weights[:, :, None] * grad[:, None, :]
        grad_weights = np.einsum("qd,qkd->qk", grad, self.values)
        centered = grad_weights - (grad_weights * self.weights).sum(axis=1, keepdims=True)
        return centered / self.delta, grad_values


def weighted_average(alpha: Tensor, values: Tensor) -> Tensor:
    """Per-row average of ``values`` [Q, k, D] with positive weights ``alpha`` [Q, k].

    Weights are normalized before use, so a single neighbor is reproduced exactly.
    """
    if alpha.ndim != 2 or values.ndim != 3 or values.shape[:2] != alpha.shape:
        raise DimensionError(f"weighted_average: weights {alpha.shape} do not match values {values.shape}")
    return _WeightedAverage.apply(alpha, values)


def stack_rows(tensors: List[Tensor]) -> Tensor:
    """Stack equally shaped tensors along a new leading axis."""
    expanded = [reshape(t, (1, *t.shape)) for t in tensors]
    return concat(expanded, axis=0)
