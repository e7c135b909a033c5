"""``msgnn params``: parameter count of a configuration."""

import argparse
from pathlib import Path

from ..network import param_breakdown, param_count
from .config_file import load_model_config


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("params", help="Count trainable parameters")
    parser.add_argument("--config", type=Path, help="key=value config file")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    model_config = load_model_config(args.config)
    print(f"total {param_count(model_config)}")
    print(param_breakdown(model_config).to_string(index=False))
    return 0
