"""``msgnn synth``: build a paired rainy / clean dataset."""

import argparse
import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np
from pydantic import ValidationError

from ..config import settings
from ..errors import MsgnnError, SynthesisError
from ..imaging.dataset import CLEAN_DIR, RAIN_DIR
from ..imaging.io import load_png, quantize, save_png
from ..imaging.rain import synth_rain, synthetic_background
from ..models.rain import RainParams
from .config_file import config_error

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.tsv"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("synth", help="Synthesize rainy/clean image pairs")
    parser.add_argument("--clean-dir", type=Path, help="Directory of clean PNG images")
    parser.add_argument("--out-dir", type=Path, required=True, help="Dataset directory to create")
    parser.add_argument("--count", type=int, help="Number of pairs (default: one per clean image, or 20 generated)")
    parser.add_argument("--size", type=int, default=64, help="Side of generated backgrounds")
    parser.add_argument("--density", type=float, default=0.02)
    parser.add_argument("--angle", type=float, default=10.0, help="Streak angle from vertical in degrees")
    parser.add_argument("--length", type=int, default=9, help="Streak length in pixels")
    parser.add_argument("--intensity", type=float, default=0.8)
    parser.add_argument("--seed", type=int, default=settings.seed)
    parser.set_defaults(handler=run)


def _clean_sources(clean_dir: Path) -> List[Path]:
    if not clean_dir.is_dir():
        raise SynthesisError(f"clean image directory not found: {clean_dir}")
    sources = sorted(clean_dir.glob("*.png"))
    if not sources:
        raise SynthesisError(f"no PNG images in {clean_dir}")
    return sources


def _backgrounds(args: argparse.Namespace) -> List[Tuple[str, np.ndarray]]:
    if args.clean_dir is None:
        count = 20 if args.count is None else args.count
        if args.size < 16:
            raise SynthesisError(f"generated backgrounds need --size >= 16, got {args.size}")
        return [(f"{i:04d}", synthetic_background(args.size, args.size, args.seed + i)) for i in range(count)]

    sources = _clean_sources(args.clean_dir)
    count = len(sources) if args.count is None else args.count
    backgrounds = []
    for i in range(count):
        source = sources[i % len(sources)]
        name = source.stem if i < len(sources) else f"{source.stem}_{i // len(sources)}"
        backgrounds.append((name, load_png(source)))
    return backgrounds


def run(args: argparse.Namespace) -> int:
    if args.count is not None and args.count < 1:
        raise SynthesisError(f"--count must be positive, got {args.count}")
    backgrounds = _backgrounds(args)

    manifest: List[str] = []
    try:
        for i, (name, clean) in enumerate(backgrounds):
            try:
                params = RainParams(
                    density=args.density,
                    angle_deg=args.angle,
                    length_px=args.length,
                    intensity=args.intensity,
                    seed=args.seed + i,
                )
            except ValidationError as e:
                raise config_error(e) from e
            # Streaks are added to the 8-bit levels that end up on disk.
            clean = quantize(clean).astype(np.float32) / np.float32(255.0)
            rainy, _ = synth_rain(clean, params)
            save_png(clean, args.out_dir / CLEAN_DIR / f"{name}.png")
            save_png(rainy, args.out_dir / RAIN_DIR / f"{name}.png")
            manifest.append(params.manifest_line(name))
        (args.out_dir / MANIFEST_FILE).write_text("\n".join(manifest) + "\n", encoding="utf-8")
    except MsgnnError:
        raise
    except OSError as e:
        raise SynthesisError(f"cannot write dataset under {args.out_dir}: {e}") from e

    logger.info(f"✅ Wrote {len(manifest)} pairs to {args.out_dir}")
    print(f"wrote {len(manifest)} pairs to {args.out_dir}")
    return 0
