"""Backend selection for the layout kernels.

The env flag ATLAS_NUMBA picks the implementation:

  unset / "auto"  use numba when importable, else fall back to numpy
  "1" / "true"    require numba (ImportError propagates if missing)
  "0" / "false"   force the pure-numpy fallback

`benchmarks/bench_kernels.py` times the two side by side.
"""

from __future__ import annotations

import os

from . import _kernels_numpy

_TRUTHY = {"1", "true", "on", "yes"}
_FALSY = {"0", "false", "off", "no"}

ENV_FLAG = "ATLAS_NUMBA"


def resolve_backend_name(name: str | None = None) -> str:
    """Map an explicit name or the env flag to 'numba' or 'numpy'."""
    if name is None:
        name = os.environ.get(ENV_FLAG, "auto").strip().lower() or "auto"
    name = name.lower()
    if name in _TRUTHY or name == "numba":
        return "numba"
    if name in _FALSY or name == "numpy":
        return "numpy"
    if name == "auto":
        try:
            import numba  # noqa: F401
        except ImportError:
            return "numpy"
        return "numba"
    raise ValueError(f"unknown kernel backend {name!r}")


def get_kernels(name: str | None = None):
    """Return the kernel module for `name` (or the env flag's choice)."""
    resolved = resolve_backend_name(name)
    if resolved == "numba":
        from . import _kernels_numba

        return _kernels_numba
    return _kernels_numpy
