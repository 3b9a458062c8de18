"""Numeric kernels with a compiled core and a pure fallback.

The compiled extension is preferred when it imported cleanly; setting
KEENDELAY_PURE=1 forces the fallback.  BACKEND names the one in use.
"""

import os

if os.environ.get("KEENDELAY_PURE") == "1":
    from keendelay.kernels._pykernels import newton_polish_many, sim_steps
    BACKEND = "pure"
else:
    try:
        from keendelay.kernels._ckernels import newton_polish_many, sim_steps
        BACKEND = "compiled"
    except ImportError:
        from keendelay.kernels._pykernels import newton_polish_many, sim_steps
        BACKEND = "pure"

__all__ = ["newton_polish_many", "sim_steps", "BACKEND"]
