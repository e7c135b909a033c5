"""Image I/O, resampling, rain synthesis and quality metrics."""

from .dataset import CLEAN_DIR, RAIN_DIR, ImagePair, PairedDataset, random_crop
from .io import as_image, image_to_tensor, load_png, quantize, save_png, tensor_to_image
from .metrics import psnr, ssim, ssim_tensor
from .rain import rain_layer, streak_kernel, synth_rain, synthetic_background
from .resample import downsample

__all__ = [
    "CLEAN_DIR",
    "RAIN_DIR",
    "ImagePair",
    "PairedDataset",
    "as_image",
    "downsample",
    "image_to_tensor",
    "load_png",
    "psnr",
    "quantize",
    "rain_layer",
    "random_crop",
    "save_png",
    "ssim",
    "ssim_tensor",
    "streak_kernel",
    "synth_rain",
    "synthetic_background",
    "tensor_to_image",
]
