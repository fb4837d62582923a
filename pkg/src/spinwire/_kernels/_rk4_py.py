"""Pure-numpy fallback for the RK4 kernel, used when the extension is absent."""
import numpy as np


def rk4_apply(gen, psi0, t, steps):
    """Advance ``psi0`` by time ``t`` in ``steps`` equal RK4 steps of psi' = gen @ psi."""
    gen = np.ascontiguousarray(gen, dtype=np.complex128)
    n = gen.shape[0]
    if gen.shape != (n, n):
        raise ValueError("generator must be square")
    psi = np.array(psi0, dtype=np.complex128, copy=True)
    if psi.shape != (n,):
        raise ValueError("state length does not match generator")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    h = t / steps
    for _ in range(steps):
        k1 = gen @ psi
        k2 = gen @ (psi + (0.5 * h) * k1)
        k3 = gen @ (psi + (0.5 * h) * k2)
        k4 = gen @ (psi + h * k3)
        psi += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return psi
