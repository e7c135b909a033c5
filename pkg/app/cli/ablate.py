"""``msgnn ablate``: small-budget sweeps over one architecture axis."""

import argparse
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import pandas as pd
from pydantic import ValidationError

from ..config import settings
from ..errors import AblationError
from ..imaging.dataset import PairedDataset
from ..models.network import AttentionVariant, MsgnnConfig
from ..models.training import TrainConfig
from ..network import param_count
from ..training import evaluate, format_table, train
from ..training.evaluation import MEAN_ROW
from .config_file import load_configs

logger = logging.getLogger(__name__)

COLUMNS = ["axis", "value", "params", "psnr", "ssim", "loss"]
LOSS_WINDOW = 10

COMPONENT_ROWS: Dict[str, Dict[str, Any]] = {
    "base": {"use_fusion": False, "attention_variant": AttentionVariant.NONE, "use_graph": False},
    "fc": {"use_fusion": True, "attention_variant": AttentionVariant.NONE, "use_graph": False},
    "fc+se": {"use_fusion": True, "attention_variant": AttentionVariant.SE, "use_graph": False},
    "fc+ct": {"use_fusion": True, "attention_variant": AttentionVariant.CT, "use_graph": False},
    "fc+ct+graph": {"use_fusion": True, "attention_variant": AttentionVariant.CT, "use_graph": True},
}

SWITCHES = {"on": True, "off": False, "true": True, "false": False}


def _integer(field: str) -> Callable[[str], Dict[str, Any]]:
    def update(value: str) -> Dict[str, Any]:
        try:
            return {field: int(value)}
        except ValueError:
            raise AblationError(f"value '{value}' is not an integer") from None
    return update


def _switch(value: str) -> Dict[str, Any]:
    if value.lower() not in SWITCHES:
        raise AblationError(f"exemplar value must be on or off, got '{value}'")
    return {"use_exemplar": SWITCHES[value.lower()]}


def _component(value: str) -> Dict[str, Any]:
    if value.lower() not in COMPONENT_ROWS:
        raise AblationError(f"component row must be one of {', '.join(COMPONENT_ROWS)}, got '{value}'")
    return dict(COMPONENT_ROWS[value.lower()])


AXES: Dict[str, Callable[[str], Dict[str, Any]]] = {
    "k": _integer("k"),
    "l": _integer("patch_size"),
    "s": _integer("stride"),
    "N": _integer("n_subnets"),
    "scales": lambda value: {"scales": value},
    "exemplar": _switch,
    "attention": lambda value: {"attention_variant": value},
    "components": _component,
}

DEFAULT_VALUES: Dict[str, List[str]] = {
    "k": ["3", "5", "7"],
    "l": ["3", "5", "7"],
    "s": ["1", "2", "3"],
    "N": ["1", "2", "4"],
    "scales": ["none", "full", "full+half", "full+half+quarter"],
    "exemplar": ["off", "on"],
    "attention": ["none", "SE", "CT"],
    "components": list(COMPONENT_ROWS),
}


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("ablate", help="Sweep one architecture axis at a small step budget")
    parser.add_argument("--data", type=Path, required=True, help="Dataset with rain/ and norain/")
    parser.add_argument("--axis", required=True, help=f"One of: {', '.join(AXES)}")
    parser.add_argument("--values", nargs="+", help="Values to try (default depends on the axis)")
    parser.add_argument("--budget", type=int, default=50, help="Optimizer steps per run")
    parser.add_argument("--config", type=Path, help="Base key=value config file")
    parser.add_argument("--out", type=Path, default=Path(settings.output_dir) / "ablation", help="Output directory")
    parser.add_argument("--seed", type=int, help="Training seed for every run")
    parser.add_argument("--parallel", type=int, default=1, help="Concurrent runs in separate processes")
    parser.set_defaults(handler=run)


def point_config(base: MsgnnConfig, axis: str, value: str) -> MsgnnConfig:
    """Base config with one axis set to ``value``.

    Raises:
        AblationError: The axis is unknown or the value is invalid for it.
    """
    if axis not in AXES:
        raise AblationError(f"unsupported ablation axis '{axis}'; choose from {', '.join(AXES)}")
    update = AXES[axis](value)
    try:
        return MsgnnConfig.model_validate({**base.model_dump(), **update})
    except ValidationError as e:
        details = "; ".join(item["msg"] for item in e.errors())
        raise AblationError(f"{axis}={value} is not a valid configuration: {details}") from e


def run_point(
    data: Path,
    out_dir: Path,
    axis: str,
    value: str,
    model_config: MsgnnConfig,
    train_config: TrainConfig,
) -> Dict[str, Any]:
    """Train and evaluate one configuration in its own directory."""
    dataset = PairedDataset.from_directory(data)
    result = train(dataset, model_config, train_config, out_dir)
    _, heldout = dataset.split(train_config.holdout_fraction)
    frame = evaluate(heldout if len(heldout) else dataset, result.params, model_config)
    means = frame[frame["name"] == MEAN_ROW].iloc[0]
    recent = result.step_losses[-LOSS_WINDOW:]
    row = {
        "axis": axis,
        "value": value,
        "params": param_count(model_config),
        "psnr": float(means["psnr"]),
        "ssim": float(means["ssim"]),
        "loss": sum(recent) / len(recent) if recent else float("nan"),
    }
    logger.info(f"Ablation {axis}={value}: PSNR {row['psnr']:.3f}, SSIM {row['ssim']:.4f}, loss {row['loss']:.4f}")
    return row


def run_ablation(
    data: Path,
    axis: str,
    values: Optional[List[str]],
    budget: int,
    base_model: MsgnnConfig,
    base_train: TrainConfig,
    out_dir: Path,
    parallel: int = 1,
) -> pd.DataFrame:
    """One row per value of ``axis``, in the order given."""
    if axis not in AXES:
        raise AblationError(f"unsupported ablation axis '{axis}'; choose from {', '.join(AXES)}")
    if budget < 1:
        raise AblationError(f"--budget must be positive, got {budget}")
    chosen = [part for value in (values or DEFAULT_VALUES[axis]) for part in value.split(",") if part]
    # Every configuration is validated before any training starts.
    configs = [point_config(base_model, axis, value) for value in chosen]
    train_config = TrainConfig.model_validate(
        {**base_train.model_dump(), "max_steps": budget, "epochs": budget, "milestones": [], "eval_every": budget + 1}
    )
    jobs = [
        (data, out_dir / f"{axis}_{value.replace('+', '-')}", axis, value, config, train_config)
        for value, config in zip(chosen, configs)
    ]

    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            rows = list(pool.map(run_point, *zip(*jobs)))
    else:
        rows = [run_point(*job) for job in jobs]
    return pd.DataFrame(rows, columns=COLUMNS)


def run(args: argparse.Namespace) -> int:
    train_overrides = {"seed": args.seed} if args.seed is not None else {}
    base_model, base_train = load_configs(args.config, train_overrides={"milestones": [], **train_overrides})
    frame = run_ablation(
        args.data, args.axis, args.values, args.budget, base_model, base_train, args.out, args.parallel
    )
    args.out.mkdir(parents=True, exist_ok=True)
    frame.to_csv(args.out / f"ablation_{args.axis}.csv", index=False)
    table = format_table(frame)
    (args.out / f"ablation_{args.axis}.txt").write_text(table + "\n", encoding="utf-8")
    print(table)
    return 0
