"""Stepper backend selection.

The compiled extension is preferred; the pure-numpy module is a drop-in
fallback. HALFSCAT_FORCE_PYTHON=1 forces the fallback (used by the backend
agreement tests and the benchmark).
"""

import os

if os.environ.get("HALFSCAT_FORCE_PYTHON") == "1":
    from . import _stepper_py as _impl
else:
    try:
        from . import _stepper as _impl
    except ImportError:
        from . import _stepper_py as _impl

advance_interval = _impl.advance_interval
BACKEND_NAME = _impl.BACKEND_NAME
