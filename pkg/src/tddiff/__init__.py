"""Method-level technical-debt density decomposition over git history."""

from .similarity import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
