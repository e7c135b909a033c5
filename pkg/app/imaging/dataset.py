"""Paired rainy / clean image datasets on disk."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import DatasetError, DimensionError
from .io import PathLike, load_png

logger = logging.getLogger(__name__)

RAIN_DIR = "rain"
CLEAN_DIR = "norain"


@dataclass(frozen=True)
class ImagePair:
    """One rainy image and its clean ground truth."""
    name: str
    rainy: np.ndarray
    clean: np.ndarray


@dataclass
class PairedDataset:
    """Pairs matched by file stem under ``<root>/rain`` and ``<root>/norain``."""

    root: Path
    names: List[str]
    _cache: Dict[str, ImagePair] = field(default_factory=dict, repr=False)

    @classmethod
    def from_directory(cls, root: PathLike) -> "PairedDataset":
        """Index a dataset directory.

        Raises:
            DatasetError: A sub-directory is missing, no pairs exist, or some
                files have no partner (all offenders are listed).
        """
        root = Path(root)
        rain_dir, clean_dir = root / RAIN_DIR, root / CLEAN_DIR
        for directory in (rain_dir, clean_dir):
            if not directory.is_dir():
                raise DatasetError(f"dataset directory missing: {directory}")

        rain = {p.stem for p in rain_dir.glob("*.png")}
        clean = {p.stem for p in clean_dir.glob("*.png")}
        offenders = sorted(f"{RAIN_DIR}/{s}.png" for s in rain - clean) + sorted(
            f"{CLEAN_DIR}/{s}.png" for s in clean - rain
        )
        if offenders:
            raise DatasetError(f"unpaired files in {root}: {', '.join(offenders)}")
        if not rain:
            raise DatasetError(f"no image pairs found in {root}")

        names = sorted(rain)
        logger.info(f"Indexed {len(names)} image pairs in {root}")
        return cls(root=root, names=names)

    def __len__(self) -> int:
        return len(self.names)

    def __getitem__(self, index: int) -> ImagePair:
        name = self.names[index]
        if name not in self._cache:
            rainy = load_png(self.root / RAIN_DIR / f"{name}.png")
            clean = load_png(self.root / CLEAN_DIR / f"{name}.png")
            if rainy.shape != clean.shape:
                raise DimensionError(f"pair {name} differs in size: {rainy.shape} vs {clean.shape}")
            self._cache[name] = ImagePair(name=name, rainy=rainy, clean=clean)
        return self._cache[name]

    def subset(self, names: List[str]) -> "PairedDataset":
        return PairedDataset(root=self.root, names=list(names), _cache=self._cache)

    def split(self, holdout_fraction: float) -> Tuple["PairedDataset", "PairedDataset"]:
        """Training and held-out subsets; the held-out part is the trailing
        ``holdout_fraction`` of sorted names (rounded down)."""
        held = int(len(self.names) * holdout_fraction)
        cut = len(self.names) - held
        return self.subset(self.names[:cut]), self.subset(self.names[cut:])


def random_crop(
    rng: np.random.Generator,
    size: int,
    *images: np.ndarray,
    offset: Optional[Tuple[int, int]] = None,
) -> List[np.ndarray]:
    """Crop every image at the same random offset to ``size`` x ``size``."""
    height, width = images[0].shape[:2]
    if height < size or width < size:
        raise DimensionError(f"image of size {height}x{width} is smaller than crop {size}")
    if offset is None:
        offset = (int(rng.integers(0, height - size + 1)), int(rng.integers(0, width - size + 1)))
    top, left = offset
    return [image[top:top + size, left:left + size] for image in images]
