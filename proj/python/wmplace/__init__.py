"""Placement watermarking: placer, watermark schemes, attacks and metrics."""

from ._wmplace import *  # noqa: F401,F403
from ._wmplace import Error, cli

__all__ = [name for name in dir() if not name.startswith("_")]
