"""Kahler curvature reactions, cone checks and torus flow."""

from ._core import *  # noqa: F401,F403
from ._core import convention_version

__all__ = [name for name in dir() if not name.startswith("_")]
