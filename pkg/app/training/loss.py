"""Training objective."""

from ..imaging.metrics import ssim_tensor
from ..tensor import Tensor


def ssim_loss(prediction: Tensor, target: Tensor) -> Tensor:
    """Negative SSIM of two [3, H, W] tensors; -1 for identical inputs."""
    return -ssim_tensor(prediction, target)
