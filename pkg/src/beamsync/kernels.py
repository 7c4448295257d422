"""Backend dispatch for the numerical core.

The compiled extension (`beamsync._corekernels`, Cython) is preferred; the
pure-NumPy module `beamsync._kernels_py` is the fallback when the extension
was not built. Set ``BEAMSYNC_BACKEND=python`` or ``=compiled`` to force a
choice (forcing ``compiled`` raises if the extension is missing).
"""

import os

from . import _kernels_py

_forced = os.environ.get("BEAMSYNC_BACKEND", "auto").lower()

if _forced == "python":
    _impl = _kernels_py
elif _forced == "compiled":
    from . import _corekernels as _impl
else:
    try:
        from . import _corekernels as _impl
    except ImportError:
        _impl = _kernels_py

window_correlate = _impl.window_correlate
window_correlate_rotated = _impl.window_correlate_rotated
shifted_correlate = _impl.shifted_correlate
add_modulated = _impl.add_modulated
derotate = _impl.derotate


def backend_name():
    """Name of the active backend: 'compiled' or 'python'."""
    return _impl.BACKEND
