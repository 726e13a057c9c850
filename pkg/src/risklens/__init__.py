"""Outside-option models of risk attitude on finite alternative sets."""

from risklens.kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
