"""Select the LU kernel backend at import time.

The compiled extension is preferred when present; the NumPy fallback is
arithmetic-identical, just slower.  RLRA_BACKEND=python forces the fallback,
RLRA_BACKEND=compiled demands the extension (raising if it is missing).
"""

import os

from . import _lu_numpy

_choice = os.environ.get("RLRA_BACKEND", "auto").strip().lower()

if _choice in ("auto", ""):
    try:
        from . import _lu_cython as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _lu_numpy
        BACKEND = "python"
elif _choice == "compiled":
    from . import _lu_cython as _impl

    BACKEND = "compiled"
elif _choice == "python":
    _impl = _lu_numpy
    BACKEND = "python"
else:
    raise ValueError(f"RLRA_BACKEND must be auto, compiled, or python, not {_choice!r}")

plu_inplace = _impl.plu_inplace
