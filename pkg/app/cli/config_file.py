"""``key=value`` configuration files for the command-line tools.

Keys are ``MsgnnConfig`` or ``TrainConfig`` field names or their aliases
(``N``, ``M``, ``k``, ``l``, ``s``). ``seed`` exists in both models and sets
both; ``model.seed`` and ``train.seed`` address one of them.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Type, Union

from pydantic import BaseModel, ValidationError

from ..errors import ConfigError
from ..models.network import MsgnnConfig
from ..models.training import TrainConfig

logger = logging.getLogger(__name__)

MODEL_PREFIX = "model."
TRAIN_PREFIX = "train."


def _field_keys(model: Type[BaseModel]) -> Dict[str, str]:
    keys: Dict[str, str] = {}
    for name, info in model.model_fields.items():
        keys[name] = name
        if info.alias:
            keys[info.alias] = name
    return keys


MODEL_KEYS = _field_keys(MsgnnConfig)
TRAIN_KEYS = _field_keys(TrainConfig)


def _parse_value(raw: str) -> Any:
    text = raw.strip()
    if text.startswith("["):
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"cannot parse list value {text!r}: {e.msg}") from e
    return text


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Parse a config file into raw key/value pairs.

    Blank lines and lines starting with ``#`` are ignored.

    Raises:
        ConfigError: The file is missing or a line is not ``key=value``.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values: Dict[str, Any] = {}
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{number}: expected key=value, got {stripped!r}")
        key, raw = stripped.split("=", 1)
        values[key.strip()] = _parse_value(raw)
    logger.debug(f"Read {len(values)} config keys from {path}")
    return values


def split_config_values(values: Mapping[str, Any]) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """Route each key to the model or training config.

    Raises:
        ConfigError: A key belongs to neither.
    """
    model: Dict[str, Any] = {}
    training: Dict[str, Any] = {}
    for key, value in values.items():
        if key.startswith(MODEL_PREFIX) and key[len(MODEL_PREFIX):] in MODEL_KEYS:
            model[MODEL_KEYS[key[len(MODEL_PREFIX):]]] = value
        elif key.startswith(TRAIN_PREFIX) and key[len(TRAIN_PREFIX):] in TRAIN_KEYS:
            training[TRAIN_KEYS[key[len(TRAIN_PREFIX):]]] = value
        elif key in MODEL_KEYS or key in TRAIN_KEYS:
            if key in MODEL_KEYS:
                model[MODEL_KEYS[key]] = value
            if key in TRAIN_KEYS:
                training[TRAIN_KEYS[key]] = value
        else:
            raise ConfigError(f"unknown config key '{key}'")
    return model, training


def _validation_message(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def build_configs(
    values: Optional[Mapping[str, Any]] = None,
    model_overrides: Optional[Mapping[str, Any]] = None,
    train_overrides: Optional[Mapping[str, Any]] = None,
) -> Tuple[MsgnnConfig, TrainConfig]:
    """Validate both configs from file values plus command-line overrides.

    Raises:
        ConfigError: Any key is unknown or any value violates a constraint.
    """
    model, training = split_config_values(values or {})
    model.update(model_overrides or {})
    training.update(train_overrides or {})
    try:
        return MsgnnConfig.model_validate(model), TrainConfig.model_validate(training)
    except ValidationError as e:
        raise ConfigError(_validation_message(e)) from e


def load_configs(
    path: Optional[Union[str, Path]],
    model_overrides: Optional[Mapping[str, Any]] = None,
    train_overrides: Optional[Mapping[str, Any]] = None,
) -> Tuple[MsgnnConfig, TrainConfig]:
    """Read an optional config file and validate it with overrides applied."""
    values = read_config_file(path) if path else {}
    return build_configs(values, model_overrides, train_overrides)


def config_error(error: ValidationError) -> ConfigError:
    """Convert a pydantic error raised outside :func:`build_configs`."""
    return ConfigError(_validation_message(error))


def load_model_config(path: Optional[Union[str, Path]]) -> MsgnnConfig:
    """Network config only; training keys in the file are checked by name but not validated."""
    model, _ = split_config_values(read_config_file(path) if path else {})
    try:
        return MsgnnConfig.model_validate(model)
    except ValidationError as e:
        raise ConfigError(_validation_message(e)) from e
