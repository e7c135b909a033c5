"""Append-only per-epoch metrics log."""

import logging
import math
from pathlib import Path
from typing import List, Union

import pandas as pd

from ..models.training import EpochRecord

logger = logging.getLogger(__name__)

COLUMNS = ("epoch", "loss", "psnr", "ssim")


def _format(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.6f}"


class MetricsLog:
    """Tab-separated ``epoch loss psnr ssim`` records, one line per epoch."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)

    def append(self, record: EpochRecord) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        line = "\t".join([str(record.epoch), _format(record.loss), _format(record.psnr), _format(record.ssim)])
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(line + "\n")

    def records(self) -> List[EpochRecord]:
        if not self.path.is_file():
            return []
        rows: List[EpochRecord] = []
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            epoch, loss, psnr, ssim = line.split("\t")
            rows.append(EpochRecord(epoch=int(epoch), loss=float(loss), psnr=float(psnr), ssim=float(ssim)))
        return rows

    def truncate_after(self, epoch: int) -> None:
        """Drop records past ``epoch`` so a resumed run appends cleanly."""
        kept = [record for record in self.records() if record.epoch <= epoch]
        if self.path.is_file():
            self.path.unlink()
        for record in kept:
            self.append(record)
        logger.debug(f"Metrics log {self.path} truncated to {len(kept)} records")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([record.model_dump() for record in self.records()], columns=list(COLUMNS))
