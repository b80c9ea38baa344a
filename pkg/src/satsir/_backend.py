"""Select the compiled integration kernel, falling back to pure Python.

Set ``SATSIR_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("SATSIR_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        from . import _kernels_py as kernels

BACKEND = "compiled" if kernels.__name__.endswith("._kernels") else "python"
dopri_run = kernels.dopri_run
rhs = kernels.rhs
