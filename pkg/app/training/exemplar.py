"""Random exemplar draws during training."""

from typing import Optional

import numpy as np

from ..errors import DatasetError
from ..imaging.dataset import PairedDataset, random_crop


def draw_exemplar_index(count: int, rng: np.random.Generator, exclude_index: Optional[int] = None) -> int:
    """Uniform index in ``[0, count)``, skipping ``exclude_index`` when ``count > 1``."""
    if count < 1:
        raise DatasetError("cannot draw an exemplar from an empty dataset")
    if exclude_index is None or count == 1:
        return int(rng.integers(0, count))
    index = int(rng.integers(0, count - 1))
    return index + 1 if index >= exclude_index else index


def sample_exemplar(
    dataset: PairedDataset,
    rng: np.random.Generator,
    exclude_index: Optional[int] = None,
    crop: Optional[int] = None,
) -> np.ndarray:
    """A random rainy image other than the current sample, cropped to ``crop``."""
    index = draw_exemplar_index(len(dataset), rng, exclude_index)
    rainy = dataset[index].rainy
    if crop is None:
        return rainy
    return random_crop(rng, crop, rainy)[0]
