"""Backend selection for the graph kernels.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``NETCTL_PURE_PYTHON`` is set to a non-empty value other
than ``0``, the pure-Python implementation is used.  ``BACKEND`` names the
active choice.
"""
import os

from . import _kernels_py

_force_py = os.environ.get("NETCTL_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

hopcroft_karp = _impl.hopcroft_karp
bfs_layers = _impl.bfs_layers
max_finite_distance = _impl.max_finite_distance

__all__ = ["BACKEND", "hopcroft_karp", "bfs_layers", "max_finite_distance"]
