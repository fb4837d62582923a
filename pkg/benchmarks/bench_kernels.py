"""Benchmark the compiled RK4 kernel against the numpy fallback.

The stepped integrator is the package's hot loop (default 10_000 steps per
unit time); the exact-exponential production path is timed alongside for
scale.  Run:

    python benchmarks/bench_kernels.py
"""
import math
import time

import numpy as np

from spinwire._kernels import KERNEL_BACKEND
from spinwire._kernels._rk4_py import rk4_apply as rk4_python
from spinwire.evolve import PropagatorSpec, propagate
from spinwire.model import ControlConfig, dissipative_hamiltonian
from spinwire.qstate import basis_state

try:
    from spinwire._kernels._rk4 import rk4_apply as rk4_compiled
except ImportError:
    rk4_compiled = None


def timeit(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    h = dissipative_hamiltonian(ControlConfig(omega=(1.0, 0.0, 0.0), gamma_spont=0.1))
    gen = np.ascontiguousarray(-1j * h)
    psi = np.ascontiguousarray(basis_state("geg"))
    t = math.pi / 2
    steps = math.ceil(10_000 * t)

    print(f"selected kernel backend: {KERNEL_BACKEND}")
    print(f"workload: 8x8 decaying drive, t = pi/2, {steps} RK4 steps\n")

    py_time = timeit(lambda: rk4_python(gen, psi, t, steps), repeats=3)
    print(f"numpy fallback    : {py_time * 1e3:9.2f} ms")

    if rk4_compiled is not None:
        cy_time = timeit(lambda: rk4_compiled(gen, psi, t, steps), repeats=10)
        print(f"compiled extension: {cy_time * 1e3:9.2f} ms   ({py_time / cy_time:6.1f}x faster)")
        fast = rk4_compiled(gen, psi, t, steps)
        slow = rk4_python(gen, psi, t, steps)
        print(f"max |difference|  : {np.max(np.abs(fast - slow)):.3e}")
    else:
        print("compiled extension: not built (pip install -e . --no-build-isolation)")

    spec = PropagatorSpec(h, t)
    propagate(spec, psi)  # warm the propagator cache
    exact_time = timeit(lambda: propagate(spec, psi), repeats=10)
    print(f"\nexact exponential (cached propagator): {exact_time * 1e6:7.1f} us per application")


if __name__ == "__main__":
    main()
