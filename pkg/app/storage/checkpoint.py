"""Versioned binary checkpoints of named parameter tensors.

Layout (little-endian):

    magic      8 bytes  b"MSGNNCKP"
    version    u32
    snapshot   u32 length + UTF-8 JSON (model config, training position)
    count      u32
    count x    u32 name length + UTF-8 name, u32 rank, rank x u32 dims,
               float32 payload

Optimizer moments are stored as extra records named ``optim.m.<param>`` and
``optim.v.<param>``; readers that only need the model skip them.
"""

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, BinaryIO, Dict, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from ..errors import CheckpointError
from ..models.network import MsgnnConfig
from ..network.parameters import ParameterStore

logger = logging.getLogger(__name__)

MAGIC = b"MSGNNCKP"
FORMAT_VERSION = 1
MOMENT_PREFIXES = ("optim.m.", "optim.v.")
CHECKPOINT_PATTERN = "epoch_{epoch:04d}.ckpt"


@dataclass
class Checkpoint:
    """Everything a checkpoint file holds."""

    config: MsgnnConfig
    params: ParameterStore
    epoch: int = 0
    step: int = 0
    first_moments: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moments: Dict[str, np.ndarray] = field(default_factory=dict)
    extra: Dict[str, Any] = field(default_factory=dict)


def _write_u32(handle: BinaryIO, value: int) -> None:
    handle.write(struct.pack("<I", value))


def _read_exact(handle: BinaryIO, size: int, what: str) -> bytes:
    data = handle.read(size)
    if len(data) != size:
        raise CheckpointError(f"checkpoint truncated while reading {what}")
    return data


def _read_u32(handle: BinaryIO, what: str) -> int:
    return struct.unpack("<I", _read_exact(handle, 4, what))[0]


def _write_tensor(handle: BinaryIO, name: str, array: np.ndarray) -> None:
    encoded = name.encode("utf-8")
    _write_u32(handle, len(encoded))
    handle.write(encoded)
    _write_u32(handle, array.ndim)
    for dim in array.shape:
        _write_u32(handle, dim)
    handle.write(np.ascontiguousarray(array, dtype="<f4").tobytes())


def _read_tensor(handle: BinaryIO) -> Tuple[str, np.ndarray]:
    name = _read_exact(handle, _read_u32(handle, "name length"), "tensor name").decode("utf-8")
    rank = _read_u32(handle, f"rank of '{name}'")
    shape = tuple(_read_u32(handle, f"shape of '{name}'") for _ in range(rank))
    count = int(np.prod(shape)) if shape else 1
    payload = _read_exact(handle, 4 * count, f"payload of '{name}'")
    return name, np.frombuffer(payload, dtype="<f4").reshape(shape).astype(np.float32)


def save_checkpoint(
    path: Union[str, Path],
    config: MsgnnConfig,
    params: ParameterStore,
    epoch: int = 0,
    step: int = 0,
    first_moments: Optional[Dict[str, np.ndarray]] = None,
    second_moments: Optional[Dict[str, np.ndarray]] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write parameters, the config snapshot and optional optimizer state.

    Args:
        path: Destination file; parent directories are created.
        config (MsgnnConfig): Architecture of ``params``.
        params (ParameterStore): Values to store.
        epoch (int): Completed epochs.
        step (int): Completed optimizer steps.
        first_moments: Adam first moments keyed by parameter name.
        second_moments: Adam second moments keyed by parameter name.
        extra: Additional JSON-serializable snapshot entries.

    Returns:
        Path: The written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    snapshot = {
        "model": config.model_dump(mode="json"),
        "epoch": epoch,
        "step": step,
        "extra": extra or {},
    }
    records = list(params.arrays().items())
    for prefix, moments in zip(MOMENT_PREFIXES, (first_moments, second_moments)):
        records.extend((f"{prefix}{name}", array) for name, array in (moments or {}).items())

    encoded = json.dumps(snapshot, sort_keys=True).encode("utf-8")
    with path.open("wb") as handle:
        handle.write(MAGIC)
        _write_u32(handle, FORMAT_VERSION)
        _write_u32(handle, len(encoded))
        handle.write(encoded)
        _write_u32(handle, len(records))
        for name, array in records:
            _write_tensor(handle, name, array)

    logger.info(f"Wrote checkpoint {path} (epoch {epoch}, step {step}, {len(records)} tensors)")
    return path


def load_checkpoint(path: Union[str, Path], config: Optional[MsgnnConfig] = None) -> Checkpoint:
    """Read a checkpoint and validate it against a configuration.

    Args:
        path: Checkpoint file.
        config (Optional[MsgnnConfig]): Expected architecture; the stored
            snapshot is used when omitted.

    Returns:
        Checkpoint: Parameters as trainable tensors plus stored state.

    Raises:
        CheckpointError: The file is missing, malformed, of another format
            version, or a tensor name or shape does not match.
    """
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")

    with path.open("rb") as handle:
        if _read_exact(handle, len(MAGIC), "magic") != MAGIC:
            raise CheckpointError(f"{path} is not an MSGNN checkpoint")
        version = _read_u32(handle, "version")
        if version != FORMAT_VERSION:
            raise CheckpointError(f"{path} has format version {version}, expected {FORMAT_VERSION}")
        try:
            snapshot = json.loads(_read_exact(handle, _read_u32(handle, "snapshot length"), "snapshot"))
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise CheckpointError(f"{path} has an unreadable config snapshot: {e}") from e
        tensors = dict(_read_tensor(handle) for _ in range(_read_u32(handle, "tensor count")))

    if config is None:
        try:
            config = MsgnnConfig.model_validate(snapshot.get("model", {}))
        except ValidationError as e:
            raise CheckpointError(f"{path} has an invalid config snapshot: {e}") from e

    moments: Tuple[Dict[str, np.ndarray], Dict[str, np.ndarray]] = ({}, {})
    arrays: Dict[str, np.ndarray] = {}
    for name, array in tensors.items():
        for slot, prefix in enumerate(MOMENT_PREFIXES):
            if name.startswith(prefix):
                moments[slot][name[len(prefix):]] = array
                break
        else:
            arrays[name] = array

    params = ParameterStore.from_arrays(arrays, config)
    logger.info(f"Loaded checkpoint {path} ({len(params)} parameter tensors)")
    return Checkpoint(
        config=config,
        params=params,
        epoch=int(snapshot.get("epoch", 0)),
        step=int(snapshot.get("step", 0)),
        first_moments=moments[0],
        second_moments=moments[1],
        extra=dict(snapshot.get("extra", {})),
    )


def latest_checkpoint(directory: Union[str, Path]) -> Optional[Path]:
    """Most recent ``epoch_*.ckpt`` in ``directory``, if any."""
    candidates = sorted(Path(directory).glob("epoch_*.ckpt"))
    return candidates[-1] if candidates else None
