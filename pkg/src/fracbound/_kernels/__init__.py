"""Hot kernels, compiled when available.

The Cython extension ``_ckernels`` is used if it was built; otherwise the
numpy fallback ``_pykernels`` is used.  Set ``FRACBOUND_PURE_PYTHON=1`` to
force the fallback.
"""
import os

from . import _pykernels

if os.environ.get("FRACBOUND_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

holder_pair_max = _impl.holder_pair_max
causal_convolve = _impl.causal_convolve

__all__ = ["BACKEND", "holder_pair_max", "causal_convolve"]
