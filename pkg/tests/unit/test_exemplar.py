import numpy as np
import pytest

from app.errors import DatasetError
from app.imaging import PairedDataset
from app.training import draw_exemplar_index, sample_exemplar


def test_excluded_index_is_never_drawn():
    rng = np.random.default_rng(0)
    draws = {draw_exemplar_index(4, rng, exclude_index=2) for _ in range(200)}
    assert draws == {0, 1, 3}


def test_single_image_may_be_its_own_exemplar():
    assert draw_exemplar_index(1, np.random.default_rng(0), exclude_index=0) == 0


def test_empty_dataset():
    with pytest.raises(DatasetError):
        draw_exemplar_index(0, np.random.default_rng(0))


def test_draws_are_seeded():
    a = [draw_exemplar_index(10, np.random.default_rng(5)) for _ in range(3)]
    b = [draw_exemplar_index(10, np.random.default_rng(5)) for _ in range(3)]
    assert a == b


@pytest.mark.parametrize("exclude_index,eligible", [(2, [0, 1, 3, 4]), (None, [0, 1, 2, 3, 4])])
def test_draws_are_uniform_over_eligible_images(exclude_index, eligible):
    rng = np.random.default_rng(21)
    draws = np.array([draw_exemplar_index(5, rng, exclude_index=exclude_index) for _ in range(10_000)])
    counts = np.bincount(draws, minlength=5)
    expected = 1.0 / len(eligible)
    for index in range(5):
        if index in eligible:
            assert abs(counts[index] / draws.size - expected) < 0.05
        else:
            assert counts[index] == 0


def test_sample_is_a_cropped_rainy_image(pair_dir):
    dataset = PairedDataset.from_directory(pair_dir)
    exemplar = sample_exemplar(dataset, np.random.default_rng(3), exclude_index=0, crop=16)
    assert exemplar.shape == (16, 16, 3)
    full = sample_exemplar(dataset, np.random.default_rng(3), exclude_index=0)
    assert any(np.array_equal(full, dataset[i].rainy) for i in range(1, len(dataset)))
