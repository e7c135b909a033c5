"""PSNR / SSIM evaluation of a trained network on paired images."""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from ..imaging.dataset import PairedDataset
from ..imaging.metrics import psnr, ssim
from ..models.network import MsgnnConfig
from ..models.training import EvaluationRow
from ..network import ParameterStore, derain_image

logger = logging.getLogger(__name__)

MEAN_ROW = "mean"
COLUMNS = ["name", "psnr", "ssim", "input_psnr", "input_ssim"]


def evaluate(
    dataset: PairedDataset,
    params: ParameterStore,
    config: MsgnnConfig,
    exemplar: Optional[np.ndarray] = None,
) -> pd.DataFrame:
    """Per-image metrics plus a trailing ``mean`` row.

    Each rainy image is derained at full size with itself as exemplar unless
    a fixed ``exemplar`` is given. ``input_psnr``/``input_ssim`` score the
    rainy input against the same ground truth.
    """
    rows = []
    for index in range(len(dataset)):
        pair = dataset[index]
        background, _ = derain_image(pair.rainy, exemplar, params, config)
        row = EvaluationRow(
            name=pair.name,
            psnr=psnr(background, pair.clean),
            ssim=ssim(background, pair.clean),
            input_psnr=psnr(pair.rainy, pair.clean),
            input_ssim=ssim(pair.rainy, pair.clean),
        )
        logger.debug(f"{row.name}: PSNR {row.psnr:.3f} SSIM {row.ssim:.4f}")
        rows.append(row.model_dump())

    frame = pd.DataFrame(rows, columns=COLUMNS)
    means = frame[COLUMNS[1:]].mean(axis=0)
    frame.loc[len(frame)] = [MEAN_ROW, *means.tolist()]
    logger.info(
        f"Evaluated {len(dataset)} images: PSNR {means['psnr']:.3f} dB (input {means['input_psnr']:.3f}), "
        f"SSIM {means['ssim']:.4f} (input {means['input_ssim']:.4f})"
    )
    return frame


def format_table(frame: pd.DataFrame) -> str:
    """Aligned text table; PSNR columns with 3 decimals, SSIM with 4."""
    formatters = {
        column: (lambda v: f"{v:.3f}") if "psnr" in column else (lambda v: f"{v:.4f}")
        for column in frame.columns
        if "psnr" in column or "ssim" in column
    }
    return frame.to_string(index=False, formatters=formatters)


def write_report(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Write the CSV to ``path`` and the text table next to it as ``.txt``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    path.with_suffix(".txt").write_text(format_table(frame) + "\n", encoding="utf-8")
    logger.info(f"Wrote evaluation report {path}")
    return path
