"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy
fallback.  Setting ``LOGNNET_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _pycore

if os.environ.get("LOGNNET_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pycore
else:
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        _impl = _pycore

BACKEND = _impl.BACKEND


def get(name=None):
    """Return the kernel module for ``name`` ("compiled", "python") or the
    active one."""
    if name is None:
        return _impl
    if name == "python":
        return _pycore
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")


def available():
    names = ["python"]
    try:
        from . import _core  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names
