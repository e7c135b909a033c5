"""``msgnn train``: train a network on a paired dataset."""

import argparse
import logging
from pathlib import Path

from ..config import settings
from ..errors import CheckpointError
from ..imaging.dataset import PairedDataset
from ..storage import latest_checkpoint
from ..training import train
from .config_file import build_configs, read_config_file, split_config_values

logger = logging.getLogger(__name__)

LATEST = "latest"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("train", help="Train the deraining network")
    parser.add_argument("--data", type=Path, required=True, help="Dataset with rain/ and norain/")
    parser.add_argument("--config", type=Path, help="key=value config file")
    parser.add_argument("--out", type=Path, default=Path(settings.output_dir), help="Run directory")
    parser.add_argument("--seed", type=int, help="Training seed (overrides the config file)")
    parser.add_argument("--max-steps", type=int, help="Stop after this many optimizer steps")
    parser.add_argument("--resume", help=f"Checkpoint to continue from, or '{LATEST}' for the newest in --out")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    values = read_config_file(args.config) if args.config else {}
    model_values, train_values = split_config_values(values)
    # Environment settings are defaults; the config file and flags win.
    train_values = {
        "checkpoint_interval": settings.checkpoint_interval,
        "holdout_fraction": settings.holdout_fraction,
        **train_values,
    }
    if args.seed is not None:
        train_values["seed"] = args.seed
    if args.max_steps is not None:
        train_values["max_steps"] = args.max_steps
    model_config, train_config = build_configs(model_overrides=model_values, train_overrides=train_values)

    resume = args.resume
    if resume == LATEST:
        resume = latest_checkpoint(args.out)
        if resume is None:
            raise CheckpointError(f"no checkpoint to resume in {args.out}")

    dataset = PairedDataset.from_directory(args.data)
    result = train(dataset, model_config, train_config, args.out, resume=resume)
    logger.info(f"✅ Training finished after {result.state.step} steps")
    if result.records:
        last = result.records[-1]
        print(f"epoch {last.epoch}\tloss {last.loss:.6f}\tpsnr {last.psnr:.3f}\tssim {last.ssim:.4f}")
    if result.checkpoint:
        print(f"checkpoint {result.checkpoint}")
    return 0
