"""MSGNN - single-image deraining with a multi-scale patch graph network."""

__version__ = "0.1.0"
