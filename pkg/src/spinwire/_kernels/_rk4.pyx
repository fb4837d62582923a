# cython: boundscheck=False, wraparound=False, cdivision=True
"""Fixed-step classical Runge-Kutta (4th order) propagation of a complex vector.

Integrates psi' = gen @ psi for a constant generator matrix ``gen``; the
caller passes ``gen = -i H``.  This is the hot loop of the stepped
integrator (default 10_000 steps per unit time), hence the compiled kernel.
"""
import numpy as np


def rk4_apply(double complex[:, ::1] gen, double complex[::1] psi0,
              double t, Py_ssize_t steps):
    """Advance ``psi0`` by time ``t`` in ``steps`` equal RK4 steps."""
    cdef Py_ssize_t n = gen.shape[0]
    if gen.shape[1] != n:
        raise ValueError("generator must be square")
    if psi0.shape[0] != n:
        raise ValueError("state length does not match generator")
    if steps < 1:
        raise ValueError("steps must be >= 1")

    out = np.array(psi0, dtype=np.complex128, copy=True)
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    tmp = np.empty(n, dtype=np.complex128)

    cdef double complex[::1] psi = out
    cdef double complex[::1] k1v = k1, k2v = k2, k3v = k3, k4v = k4, tv = tmp
    cdef double h = t / steps
    cdef double h2 = h / 2.0, h6 = h / 6.0
    cdef Py_ssize_t s, i, j
    cdef double complex acc

    for s in range(steps):
        for i in range(n):
            acc = 0
            for j in range(n):
                acc = acc + gen[i, j] * psi[j]
            k1v[i] = acc
        for i in range(n):
            tv[i] = psi[i] + h2 * k1v[i]
        for i in range(n):
            acc = 0
            for j in range(n):
                acc = acc + gen[i, j] * tv[j]
            k2v[i] = acc
        for i in range(n):
            tv[i] = psi[i] + h2 * k2v[i]
        for i in range(n):
            acc = 0
            for j in range(n):
                acc = acc + gen[i, j] * tv[j]
            k3v[i] = acc
        for i in range(n):
            tv[i] = psi[i] + h * k3v[i]
        for i in range(n):
            acc = 0
            for j in range(n):
                acc = acc + gen[i, j] * tv[j]
            k4v[i] = acc
        for i in range(n):
            psi[i] = psi[i] + h6 * (k1v[i] + 2.0 * (k2v[i] + k3v[i]) + k4v[i])

    return out
