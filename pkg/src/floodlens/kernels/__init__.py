"""Hot-kernel backend selection.

The compiled Cython extension is preferred; the pure-numpy fallback is
used when the extension is missing or FLOODLENS_PURE=1 is set. Both
backends produce bit-identical results.
"""

import os

from . import _pure

if os.environ.get("FLOODLENS_PURE") == "1":
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

lbp_codes = _impl.lbp_codes
assign_labels = _impl.assign_labels

__all__ = ["lbp_codes", "assign_labels", "BACKEND"]
