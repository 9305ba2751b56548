"""Select the monodromy kernel at import time.

The compiled extension is used when it was built; set
``HILLGRAPH_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _kernel_py

if os.environ.get("HILLGRAPH_PURE_PYTHON", "").strip() not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernel as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

_impl = _compiled if _compiled is not None else _kernel_py
magnus_transfer = _impl.magnus_transfer
magnus_path = _impl.magnus_path
