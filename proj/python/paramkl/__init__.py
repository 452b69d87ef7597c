"""Spectral analysis and reduction of sampled parametric models."""

from ._paramkl import *  # noqa: F401,F403
from ._paramkl import Error, ParameterGrid, SnapshotSet, decompose, full_model, truncate

__all__ = [name for name in dir() if not name.startswith("_")]
