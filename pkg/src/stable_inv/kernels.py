"""Backend selection for the elastic-force kernel.

The compiled extension is used when it imported cleanly; setting
``STABLE_INV_PURE_PYTHON=1`` forces the NumPy implementation.
"""
import os

from . import _kernels_py

if os.environ.get("STABLE_INV_PURE_PYTHON", "") == "1":
    _impl = _kernels_py
    BACKEND = "numpy"
else:
    try:
        from . import _ancf_kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "numpy"

numpy_elastic_batch = _kernels_py.elastic_batch


def elastic_batch(axx, ayy, axy, w, lam, mu, ebatch, need_tangent=True):
    return _impl.elastic_batch(axx, ayy, axy, w, lam, mu, ebatch, need_tangent)


def backend_name():
    return BACKEND
