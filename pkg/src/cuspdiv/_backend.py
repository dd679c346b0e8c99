"""Kernel backend selection.

The compiled extension is preferred when importable; set CUSPDIV_BACKEND to
"python" or "cython" to force a choice (forcing "cython" raises if the
extension is missing). ``backend_name()`` reports what is active.
"""

import os

from . import _kernels_py

_FORCE = os.environ.get("CUSPDIV_BACKEND", "").strip().lower()

if _FORCE == "python":
    _impl = _kernels_py
    _name = "python"
elif _FORCE == "cython":
    from . import _kernels as _impl  # noqa: F401
    _name = "cython"
else:
    try:
        from . import _kernels as _impl  # noqa: F811
        _name = "cython"
    except ImportError:
        _impl = _kernels_py
        _name = "python"

far_field_sum = _impl.far_field_sum
drop_nearest_sum = _impl.drop_nearest_sum
chord_moments = _impl.chord_moments


def backend_name():
    return _name


def get_backend(name):
    """Return the kernel module for an explicit backend name (for benchmarks)."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
