"""Dense tensor arithmetic with reverse-mode gradients."""

from . import ops
from .gradcheck import finite_diff_check
from .ops import (
    add,
    bilinear_resize,
    clamp,
    concat,
    concat_channels,
    conv2d,
    crop,
    div,
    exp,
    fold_patches,
    leaky_relu,
    mean,
    mul,
    reflect_pad,
    relu,
    reshape,
    scalar_mul,
    scale_channels,
    sigmoid,
    slice_axis,
    slice_channels,
    stack_rows,
    sub,
    take,
    unfold_patches,
    weighted_average,
)
from .ops import sum as tensor_sum
from .tensor import (
    Function,
    GradientMap,
    Tensor,
    backward,
    get_default_dtype,
    is_grad_enabled,
    no_grad,
    parameter,
    precision,
)

__all__ = [
    "Function",
    "GradientMap",
    "Tensor",
    "add",
    "backward",
    "bilinear_resize",
    "clamp",
    "concat",
    "concat_channels",
    "conv2d",
    "crop",
    "div",
    "exp",
    "finite_diff_check",
    "fold_patches",
    "get_default_dtype",
    "is_grad_enabled",
    "leaky_relu",
    "mean",
    "mul",
    "no_grad",
    "ops",
    "parameter",
    "precision",
    "reflect_pad",
    "relu",
    "reshape",
    "scalar_mul",
    "scale_channels",
    "sigmoid",
    "slice_axis",
    "slice_channels",
    "stack_rows",
    "sub",
    "take",
    "tensor_sum",
    "unfold_patches",
    "weighted_average",
]
