import numpy as np
import pytest

from app.errors import DatasetError, DimensionError
from app.imaging import CLEAN_DIR, RAIN_DIR, PairedDataset, random_crop, save_png


def test_indexes_sorted_pairs(pair_dir):
    dataset = PairedDataset.from_directory(pair_dir)
    assert dataset.names == ["0000", "0001", "0002", "0003", "0004"]
    assert len(dataset) == 5
    pair = dataset[2]
    assert pair.name == "0002"
    assert pair.rainy.shape == pair.clean.shape == (32, 32, 3)


def test_pairs_are_cached(pair_dir):
    dataset = PairedDataset.from_directory(pair_dir)
    assert dataset[0] is dataset[0]


def test_missing_subdirectory(tmp_path):
    (tmp_path / RAIN_DIR).mkdir()
    with pytest.raises(DatasetError, match=CLEAN_DIR):
        PairedDataset.from_directory(tmp_path)


def test_empty_dataset(tmp_path):
    (tmp_path / RAIN_DIR).mkdir()
    (tmp_path / CLEAN_DIR).mkdir()
    with pytest.raises(DatasetError, match="no image pairs"):
        PairedDataset.from_directory(tmp_path)


def test_lists_every_unpaired_file(pair_dir):
    (pair_dir / CLEAN_DIR / "0001.png").unlink()
    (pair_dir / RAIN_DIR / "0003.png").unlink()
    with pytest.raises(DatasetError) as excinfo:
        PairedDataset.from_directory(pair_dir)
    assert "rain/0001.png" in excinfo.value.message
    assert "norain/0003.png" in excinfo.value.message


def test_size_mismatch_surfaces_on_load(pair_dir):
    save_png(np.zeros((16, 32, 3)), pair_dir / RAIN_DIR / "0004.png")
    dataset = PairedDataset.from_directory(pair_dir)
    with pytest.raises(DimensionError, match="0004"):
        dataset[4]


def test_split_holds_out_trailing_names(pair_dir):
    train, held = PairedDataset.from_directory(pair_dir).split(0.4)
    assert train.names == ["0000", "0001", "0002"]
    assert held.names == ["0003", "0004"]


def test_split_rounds_down(pair_dir):
    train, held = PairedDataset.from_directory(pair_dir).split(0.1)
    assert len(train) == 5
    assert len(held) == 0


def test_random_crop_aligns_images(rng, random_image):
    a = random_image(20, 24)
    b = a + 1.0
    crop_a, crop_b = random_crop(rng, 8, a, b)
    assert crop_a.shape == (8, 8, 3)
    np.testing.assert_allclose(crop_b, crop_a + 1.0)


def test_random_crop_at_offset(rng, random_image):
    image = random_image(10, 10)
    (crop,) = random_crop(rng, 4, image, offset=(2, 3))
    np.testing.assert_array_equal(crop, image[2:6, 3:7])


def test_random_crop_too_small(rng, random_image):
    with pytest.raises(DimensionError):
        random_crop(rng, 16, random_image(12, 20))
