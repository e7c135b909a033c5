"""``msgnn derain``: remove rain from one image."""

import argparse
import logging
from pathlib import Path
from typing import Optional

import numpy as np

from ..imaging.io import load_png, save_png
from ..network import derain_image
from ..storage import Checkpoint, load_checkpoint
from .config_file import load_model_config

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("derain", help="Derain a single image")
    parser.add_argument("--input", type=Path, required=True, help="Rainy PNG")
    parser.add_argument("--checkpoint", type=Path, required=True)
    parser.add_argument("--output", type=Path, required=True, help="Derained PNG to write")
    parser.add_argument("--exemplar", type=Path, help="Exemplar PNG (default: the input itself)")
    parser.add_argument("--residual", type=Path, help="Also write the predicted rain layer")
    parser.add_argument("--grid", type=Path, help="Also write an input | derained | residual strip")
    parser.add_argument("--config", type=Path, help="Config the checkpoint must match")
    parser.set_defaults(handler=run)


def open_checkpoint(path: Path, config_path: Optional[Path]) -> Checkpoint:
    """Load a checkpoint, validated against ``config_path`` when given."""
    if config_path is None:
        return load_checkpoint(path)
    model_config = load_model_config(config_path)
    return load_checkpoint(path, model_config)


def comparison_grid(rainy: np.ndarray, background: np.ndarray, rain: np.ndarray) -> np.ndarray:
    """Side-by-side strip with 4 px white gutters."""
    gutter = np.ones((rainy.shape[0], 4, 3), dtype=np.float32)
    return np.concatenate([rainy, gutter, background, gutter, np.clip(rain, 0.0, 1.0)], axis=1)


def run(args: argparse.Namespace) -> int:
    checkpoint = open_checkpoint(args.checkpoint, args.config)
    rainy = load_png(args.input)
    exemplar = load_png(args.exemplar) if args.exemplar else None

    background, rain = derain_image(rainy, exemplar, checkpoint.params, checkpoint.config)
    save_png(background, args.output)
    if args.residual:
        save_png(np.clip(rain, 0.0, 1.0), args.residual)
    if args.grid:
        save_png(comparison_grid(rainy, background, rain), args.grid)

    logger.info(f"✅ Derained {args.input} -> {args.output}")
    print(f"wrote {args.output}")
    return 0
