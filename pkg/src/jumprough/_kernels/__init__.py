"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation if
the extension is missing. Set ``JUMPROUGH_BACKEND=python`` or ``=c`` to
force a choice (forcing ``c`` raises if the extension failed to build).
"""

import os

_choice = os.environ.get("JUMPROUGH_BACKEND", "").lower()

if _choice == "python":
    from . import _pykernels as kernels
elif _choice == "c":
    from . import _ckernels as kernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        from . import _pykernels as kernels

BACKEND = kernels.BACKEND
level_offsets = kernels.level_offsets
tensor_size = kernels.tensor_size
tensor_mul = kernels.tensor_mul
tensor_exp = kernels.tensor_exp
tensor_log = kernels.tensor_log
sig_product = kernels.sig_product
pvar_dp = kernels.pvar_dp
