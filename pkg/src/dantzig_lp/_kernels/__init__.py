"""Hot loops, compiled when the Cython extension is available.

``BACKEND`` reports which implementation is active.  Setting the environment
variable ``DANTZIG_LP_PURE_PYTHON=1`` before import forces the fallback.
"""
import os

from . import _pykernels as python

if os.environ.get("DANTZIG_LP_PURE_PYTHON", "") not in ("", "0"):
    compiled = None
else:
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

_impl = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

fused_dp = _impl.fused_dp
cd_gram = _impl.cd_gram
cd_csc = _impl.cd_csc

__all__ = ["BACKEND", "compiled", "python", "fused_dp", "cd_gram", "cd_csc"]
