"""Numerical hot kernels: compiled extension when built, numpy fallback otherwise.

Both backends implement the same fixed-step RK4 integrator and agree to
machine roundoff; only speed differs.  ``KERNEL_BACKEND`` records which one
was selected at import time.
"""
try:
    from ._rk4 import rk4_apply
    KERNEL_BACKEND = "compiled"
except ImportError:
    from ._rk4_py import rk4_apply
    KERNEL_BACKEND = "python"

__all__ = ["rk4_apply", "KERNEL_BACKEND"]
