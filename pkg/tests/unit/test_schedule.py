import numpy as np
import pytest
from pydantic import ValidationError

from app.errors import ContractError
from app.models import TrainConfig
from app.tensor import Tensor
from app.training import lr_at, ssim_loss


def test_default_schedule():
    config = TrainConfig()
    assert lr_at(0, config) == pytest.approx(5e-4)
    assert lr_at(299, config) == pytest.approx(5e-4)
    assert lr_at(300, config) == pytest.approx(5e-5)
    assert lr_at(399, config) == pytest.approx(5e-5)
    assert lr_at(400, config) == pytest.approx(5e-6)
    assert lr_at(499, config) == pytest.approx(5e-6)


def test_no_milestones_keeps_rate():
    config = TrainConfig(epochs=3, milestones=[])
    assert [lr_at(e, config) for e in range(3)] == [5e-4] * 3


def test_epoch_out_of_range():
    config = TrainConfig(epochs=3, milestones="")
    with pytest.raises(ContractError):
        lr_at(3, config)
    with pytest.raises(ContractError):
        lr_at(-1, config)


@pytest.mark.parametrize(
    "overrides",
    [
        {"milestones": [5, 3], "epochs": 10},
        {"milestones": [10], "epochs": 10},
        {"crop": 30},
        {"crop": 12},
        {"lr": 0.0},
    ],
)
def test_invalid_training_config(overrides):
    with pytest.raises(ValidationError):
        TrainConfig(**overrides)


def test_ssim_loss_of_identical_images():
    image = Tensor(np.random.default_rng(2).random((3, 16, 16)))
    assert ssim_loss(image, image).item() == pytest.approx(-1.0, abs=1e-6)
