"""Runtime settings and logging setup for MSGNN."""

import logging
import os
from dataclasses import dataclass

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


@dataclass
class MsgnnSettings:
    """Process-wide settings for the deraining tools.

    Attributes:
        log_level (str): Root log level used by the CLI.
        output_dir (str): Default directory for training runs.
        checkpoint_interval (int): Epochs between checkpoints.
        holdout_fraction (float): Trailing fraction of sorted pairs held out.
        knn_chunk (int): Query rows per distance block in k-NN search.
        seed (int): Default seed for commands that accept one.
    """

    log_level: str = os.getenv("MSGNN_LOG_LEVEL", "INFO")
    output_dir: str = os.getenv("MSGNN_OUTPUT_DIR", "runs")
    checkpoint_interval: int = int(os.getenv("MSGNN_CHECKPOINT_INTERVAL", "1"))
    holdout_fraction: float = float(os.getenv("MSGNN_HOLDOUT_FRACTION", "0.2"))
    knn_chunk: int = int(os.getenv("MSGNN_KNN_CHUNK", "128"))
    seed: int = int(os.getenv("MSGNN_SEED", "7"))


def setup_logging(level: str = "INFO") -> None:
    """Configure root logging the same way for every entry point."""
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT)


# Global settings instance
settings = MsgnnSettings()
