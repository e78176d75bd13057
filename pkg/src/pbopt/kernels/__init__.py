"""Kernel selection: compiled extension when available, pure Python otherwise.

Set PBOPT_PURE_PYTHON=1 to force the fallback (used by the tests and the
kernel benchmark). ``BACKEND`` reports which lane is active.
"""

import os

from .pyfallback import ACT_SIGMOID, ACT_TANH, WHICH_CORR, WHICH_MEAN, WHICH_STDDEV

if os.environ.get("PBOPT_PURE_PYTHON"):
    from .pyfallback import PolicyUpdateKernel, lorenz_rk4
    BACKEND = "python"
else:
    try:
        from ._native import PolicyUpdateKernel, lorenz_rk4
        BACKEND = "compiled"
    except ImportError:
        from .pyfallback import PolicyUpdateKernel, lorenz_rk4
        BACKEND = "python"

__all__ = ["ACT_SIGMOID", "ACT_TANH", "BACKEND", "PolicyUpdateKernel",
           "WHICH_CORR", "WHICH_MEAN", "WHICH_STDDEV", "lorenz_rk4"]
