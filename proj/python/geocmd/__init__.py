"""Natural-language to GIS function call translation: Python bindings."""

from ._core import *  # noqa: F401,F403
from ._core import GeocmdError, FUNCTION_NAMES

__all__ = [name for name in dir() if not name.startswith("_")]
