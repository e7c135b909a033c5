import math

import numpy as np
import pytest

from app.errors import DimensionError
from app.imaging import psnr, ssim, ssim_tensor
from app.tensor import Tensor, finite_diff_check, precision


def test_psnr_of_identical_images_is_infinite(random_image):
    image = random_image()
    assert psnr(image, image) == math.inf


def test_psnr_known_value():
    a = np.zeros((4, 4, 3), dtype=np.float32)
    b = np.full((4, 4, 3), 0.1, dtype=np.float32)
    assert psnr(a, b) == pytest.approx(20.0, abs=1e-4)


def test_psnr_size_mismatch(random_image):
    with pytest.raises(DimensionError):
        psnr(random_image(4, 4), random_image(4, 5))


def test_ssim_of_identical_images_is_one(random_image):
    image = random_image(16, 16)
    assert ssim(image, image) == pytest.approx(1.0, abs=1e-9)


def test_ssim_is_symmetric_and_drops_with_noise(random_image, rng):
    image = random_image(20, 20)
    noisy = np.clip(image + rng.normal(0, 0.2, image.shape), 0, 1)
    assert ssim(image, noisy) == pytest.approx(ssim(noisy, image))
    assert ssim(image, noisy) < 0.9


def test_ssim_needs_a_full_window(random_image):
    with pytest.raises(DimensionError):
        ssim(random_image(10, 20), random_image(10, 20))


def test_tensor_ssim_matches_array_ssim(random_image):
    a = random_image(14, 13)
    b = random_image(14, 13)
    with precision(np.float64):
        value = ssim_tensor(Tensor(a.transpose(2, 0, 1)), Tensor(b.transpose(2, 0, 1))).item()
    assert value == pytest.approx(ssim(a, b), abs=1e-9)


def test_tensor_ssim_gradient(random_image):
    a = random_image(12, 12).transpose(2, 0, 1)
    b = random_image(12, 12).transpose(2, 0, 1)
    target = Tensor(b)
    error = finite_diff_check(lambda ps: ssim_tensor(ps[0], Tensor(target.data)), [Tensor(a)], eps=1e-6)
    assert error < 1e-3


def test_tensor_ssim_shape_checks():
    with pytest.raises(DimensionError):
        ssim_tensor(Tensor(np.zeros((3, 12, 12))), Tensor(np.zeros((3, 12, 11))))
    with pytest.raises(DimensionError):
        ssim_tensor(Tensor(np.zeros((3, 8, 8))), Tensor(np.zeros((3, 8, 8))))


def windowed_ssim(a, b, size=11, sigma=1.5):
    """SSIM from explicit 11x11 windows with centered moments."""
    offsets = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(offsets[:, None] ** 2 + offsets[None, :] ** 2) / (2 * sigma**2))
    g /= g.sum()
    c1, c2 = 0.01**2, 0.03**2
    values = []
    for c in range(a.shape[2]):
        x = np.lib.stride_tricks.sliding_window_view(a[:, :, c].astype(np.float64), (size, size))
        y = np.lib.stride_tricks.sliding_window_view(b[:, :, c].astype(np.float64), (size, size))
        mu_x = np.einsum("ijkl,kl->ij", x, g)
        mu_y = np.einsum("ijkl,kl->ij", y, g)
        dx = x - mu_x[:, :, None, None]
        dy = y - mu_y[:, :, None, None]
        var_x = np.einsum("ijkl,kl->ij", dx * dx, g)
        var_y = np.einsum("ijkl,kl->ij", dy * dy, g)
        cov = np.einsum("ijkl,kl->ij", dx * dy, g)
        index = ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / ((mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2))
        values.append(index.mean())
    return float(np.mean(values))


@pytest.mark.parametrize("seed", range(50))
def test_ssim_matches_windowed_reference(seed):
    rng = np.random.default_rng(seed)
    a = rng.random((64, 64, 3))
    b = np.clip(a + rng.normal(0, rng.uniform(0.01, 0.5), a.shape), 0, 1)
    assert ssim(a, b) == pytest.approx(windowed_ssim(a, b), abs=1e-5)


def test_ssim_loss_stays_in_range():
    rng = np.random.default_rng(11)
    for i in range(1000):
        a = rng.random((12, 12, 3))
        # Every fourth pair is the inverted image, the most dissimilar case.
        b = 1.0 - a if i % 4 == 0 else rng.random((12, 12, 3))
        loss = -ssim(a, b)
        assert -1.0 <= loss <= 1.0
