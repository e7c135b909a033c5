"""``msgnn eval``: PSNR / SSIM of a checkpoint on a paired dataset."""

import argparse
import logging
from pathlib import Path

from ..imaging.dataset import PairedDataset
from ..imaging.io import load_png
from ..training import evaluate, format_table, write_report
from .derain import open_checkpoint

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("eval", help="Evaluate a checkpoint on paired images")
    parser.add_argument("--data", type=Path, required=True, help="Dataset with rain/ and norain/")
    parser.add_argument("--checkpoint", type=Path, required=True)
    parser.add_argument("--report", type=Path, help="CSV report; a .txt table is written next to it")
    parser.add_argument("--exemplar", type=Path, help="Fixed exemplar PNG (default: each input itself)")
    parser.add_argument("--config", type=Path, help="Config the checkpoint must match")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    checkpoint = open_checkpoint(args.checkpoint, args.config)
    dataset = PairedDataset.from_directory(args.data)
    exemplar = load_png(args.exemplar) if args.exemplar else None

    frame = evaluate(dataset, checkpoint.params, checkpoint.config, exemplar)
    if args.report:
        write_report(frame, args.report)
    print(format_table(frame))
    return 0
