"""Independent reference constructions used to cross-check the package.

Everything here is deliberately built by a different route than the library:
Hamiltonians are assembled from explicit tensor products of 2x2 matrices
(the library uses basis-index bit logic), and the reference integrator is a
tiny pure-python RK4 that touches no library code.
"""
import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[-1, 0], [0, 1]], dtype=complex)   # z|g> = -|g>, z|e> = +|e>
SPLUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |e><g|
SMINUS = np.array([[0, 1], [0, 0]], dtype=complex)
PEXC = np.array([[0, 0], [0, 1]], dtype=complex)   # |e><e|

PARTNERS = {1: (2, 3), 2: (3, 1), 3: (1, 2)}


def embed(op, atom):
    """op acting on one atom, identity elsewhere, atom 1 most significant."""
    factors = [I2, I2, I2]
    factors[atom - 1] = op
    return np.kron(factors[0], np.kron(factors[1], factors[2]))


def secular_reference(omega):
    """(1/2) sum_i omega_i sigma^x_i (1 - sigma^z_j sigma^z_k), tensor route."""
    h = np.zeros((8, 8), dtype=complex)
    for i in (1, 2, 3):
        j, k = PARTNERS[i]
        proj = (np.eye(8) - embed(SZ, j) @ embed(SZ, k)) / 2.0
        h += omega[i - 1] * embed(SX, i) @ proj
    return h


def ising_reference(omega, j_coupling):
    h = np.zeros((8, 8), dtype=complex)
    for a, b in ((1, 2), (2, 3), (1, 3)):
        h += j_coupling * embed(SZ, a) @ embed(SZ, b)
    for i in (1, 2, 3):
        h += omega[i - 1] * (embed(SPLUS, i) + embed(SMINUS, i))
    return h


def dissipative_reference(omega, gamma):
    h = secular_reference(omega)
    for i in (1, 2, 3):
        h += -1j * gamma * embed(PEXC, i)
    return h


def stark_reference(chi, atom):
    return chi * embed(PEXC, atom)


def rk4_reference(h, psi, t, steps):
    """Plain-python RK4 for psi' = -i h psi; no numpy matmul, no library code."""
    n = len(psi)
    gen = [[-1j * h[r][c] for c in range(n)] for r in range(n)]
    v = [complex(x) for x in psi]

    def mv(vec):
        return [sum(gen[r][c] * vec[c] for c in range(n)) for r in range(n)]

    dt = t / steps
    for _ in range(steps):
        k1 = mv(v)
        k2 = mv([v[i] + 0.5 * dt * k1[i] for i in range(n)])
        k3 = mv([v[i] + 0.5 * dt * k2[i] for i in range(n)])
        k4 = mv([v[i] + dt * k3[i] for i in range(n)])
        v = [v[i] + (dt / 6.0) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) for i in range(n)]
    return np.array(v)


def align_phase(matrix, reference):
    """Remove one overall unit phase from `matrix`, chosen at the largest
    entry of `reference`; lets gates be compared modulo a global phase."""
    idx = np.unravel_index(np.argmax(np.abs(reference)), reference.shape)
    pivot = matrix[idx]
    if abs(pivot) == 0:
        return matrix
    return matrix * (pivot.conjugate() / abs(pivot))


def random_state(rng, dim=8):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)
