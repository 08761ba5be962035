"""Dicke model dimensionality of eigenstates and random states."""

from ._dickedim import *  # noqa: F401,F403
from ._dickedim import ModelParams, effective_dimension, sample_shell

__all__ = [name for name in dir() if not name.startswith("_")]
