"""Error types raised across the MSGNN package.

Every error carries a short ``kind`` that the CLI prints as
``error:<kind>: <message>``.
"""


class MsgnnError(Exception):
    """Base class for all MSGNN errors."""

    kind = "msgnn"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return self.message


class DimensionError(MsgnnError):
    """Shapes or spatial sizes do not agree."""

    kind = "dimension"


class ContractError(MsgnnError):
    """A caller broke an operation's precondition."""

    kind = "contract"


class ImageNotFoundError(MsgnnError):
    """An image path does not exist."""

    kind = "missing_file"


class MalformedImageError(MsgnnError):
    """A file is not a decodable PNG."""

    kind = "malformed_png"


class UnsupportedDepthError(MsgnnError):
    """A PNG uses a bit depth other than 8."""

    kind = "unsupported_depth"


class DatasetError(MsgnnError):
    """A paired dataset is empty or has unpaired files."""

    kind = "dataset"


class ConfigError(MsgnnError):
    """A configuration value or key is invalid."""

    kind = "config"


class CheckpointError(MsgnnError):
    """A checkpoint is unreadable or does not match the configuration."""

    kind = "checkpoint"


class AblationError(MsgnnError):
    """An ablation axis or value is not supported."""

    kind = "ablation"


class SynthesisError(MsgnnError):
    """Dataset synthesis could not read or write a file."""

    kind = "io"


class FileSystemError(MsgnnError):
    """A file or directory could not be read or written."""

    kind = "io"

    @classmethod
    def from_os_error(cls, error: OSError) -> "FileSystemError":
        reason = error.strerror or str(error)
        target = error.filename if error.filename is not None else "unknown path"
        return cls(f"{reason}: {target}")
