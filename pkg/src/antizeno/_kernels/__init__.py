"""Kernel backend selection.

Imports the compiled extension when present, falling back to the pure-Python
implementation.  Set ``ANTIZENO_PURE_PYTHON=1`` to force the fallback.  Both
backends are bit-identical, so the choice only affects speed; ``BACKEND``
reports which one is active ("cython" or "python").
"""

import os

if os.environ.get("ANTIZENO_PURE_PYTHON") == "1":
    from . import _pure as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _impl

BACKEND = _impl.BACKEND
qubit_fold = _impl.qubit_fold
sweep_pass = _impl.sweep_pass
grid_scan = _impl.grid_scan

__all__ = ["BACKEND", "qubit_fold", "sweep_pass", "grid_scan"]
