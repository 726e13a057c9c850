"""Backend selection for the hot scans.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``RISKLENS_PURE_PYTHON`` is set to a non-empty value, the
numpy implementations are used.  ``BACKEND`` names the active one.
"""

from __future__ import annotations

import os

from risklens import _kernels_py

try:
    if os.environ.get("RISKLENS_PURE_PYTHON"):
        raise ImportError("pure-Python backend forced")
    from risklens import _kernels as _compiled
except ImportError:
    _compiled = None

_impl = _compiled if _compiled is not None else _kernels_py
BACKEND = "cython" if _compiled is not None else "python"

ordinal_violation = _impl.ordinal_violation
crossratio_violation = _impl.crossratio_violation
lottery_violation = _impl.lottery_violation
chi_atoms = _impl.chi_atoms


def backends() -> dict:
    """Map of every importable backend name to its module."""
    found = {"python": _kernels_py}
    if _compiled is not None:
        found["cython"] = _compiled
    return found
