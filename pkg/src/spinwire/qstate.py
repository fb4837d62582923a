"""Hilbert-space primitives for three two-level atoms.

Conventions fixed here and inherited by every other module:

* each atom has a ground state ``g`` (bit 0) and an excited state ``e`` (bit 1);
* the basis index of |s1 s2 s3> is ``4*b1 + 2*b2 + b3`` (atom 1 most
  significant), so e.g. |geg> sits at index 2 and |eeg> at index 6;
* ``sigma_z|e> = +|e>`` and ``sigma_z|g> = -|g>``.

States are plain complex ndarrays of length 8; operators and density
matrices are 8x8 complex ndarrays.  All functions are pure.
"""
from __future__ import annotations

import numpy as np

DIM = 8
ATOMS = (1, 2, 3)
GROUND = "g"
EXCITED = "e"

# bit mask of each atom inside the basis index
_MASK = {1: 4, 2: 2, 3: 1}

_SINGLE = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
    "plus": np.array([[0, 0], [1, 0]], dtype=complex),   # |e><g|
    "minus": np.array([[0, 1], [0, 0]], dtype=complex),  # |g><e|
}


def _as_bits(spins):
    if isinstance(spins, str):
        labels = tuple(spins)
    else:
        labels = tuple(spins)
    if len(labels) != 3:
        raise ValueError(f"expected three spin labels, got {labels!r}")
    bits = []
    for s in labels:
        if s == GROUND:
            bits.append(0)
        elif s == EXCITED:
            bits.append(1)
        else:
            raise ValueError(f"spin label must be 'g' or 'e', got {s!r}")
    return tuple(bits)


def basis_index(spins) -> int:
    """Basis index of a spin triple given as 'geg' or an iterable of labels."""
    b1, b2, b3 = _as_bits(spins)
    return 4 * b1 + 2 * b2 + b3


def basis_label(index: int) -> str:
    """Inverse of basis_index: 0 -> 'ggg', 6 -> 'eeg', ..."""
    if not 0 <= index < DIM:
        raise ValueError(f"basis index out of range: {index}")
    return "".join(EXCITED if (index >> shift) & 1 else GROUND for shift in (2, 1, 0))


def basis_state(spins) -> np.ndarray:
    """Computational basis vector |s1 s2 s3>."""
    psi = np.zeros(DIM, dtype=complex)
    psi[basis_index(spins)] = 1.0
    return psi


def pauli_on(which: str, atom: int) -> np.ndarray:
    """Single-atom Pauli operator ('x', 'z', 'plus', 'minus') embedded in the
    three-atom space, identity on the other two atoms."""
    try:
        op = _SINGLE[which]
    except KeyError:
        raise ValueError(f"unknown Pauli label {which!r}") from None
    if atom not in ATOMS:
        raise ValueError(f"atom index must be 1, 2 or 3, got {atom}")
    factors = [np.eye(2, dtype=complex)] * 3
    factors[atom - 1] = op
    return np.kron(factors[0], np.kron(factors[1], factors[2]))


def atom_permutation_matrix(perm) -> np.ndarray:
    """Unitary that relabels the atoms: ``perm[i-1]`` is the new label of atom i."""
    perm = tuple(perm)
    if sorted(perm) != [1, 2, 3]:
        raise ValueError(f"not a permutation of (1, 2, 3): {perm!r}")
    p = np.zeros((DIM, DIM), dtype=complex)
    for idx in range(DIM):
        bits = [(idx >> s) & 1 for s in (2, 1, 0)]
        new_bits = [0, 0, 0]
        for i in range(3):
            new_bits[perm[i] - 1] = bits[i]
        new_idx = 4 * new_bits[0] + 2 * new_bits[1] + new_bits[2]
        p[new_idx, idx] = 1.0
    return p


def _require_normalized(psi, name):
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"{name} is not normalized (|norm - 1| = {abs(norm - 1.0):.3e})")


def phase_invariant_infidelity(a, b) -> float:
    """1 - |<a|b>|^2: zero iff the states agree up to a global phase.

    Both inputs must be normalized; physical states are rays, so the global
    phase carries no information and is deliberately ignored.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _require_normalized(a, "first state")
    _require_normalized(b, "second state")
    overlap = abs(np.vdot(a, b)) ** 2
    return max(0.0, 1.0 - float(overlap))


def density_from(psi, renormalize: bool = False) -> np.ndarray:
    """Pure-state density matrix |psi><psi|, optionally divided by <psi|psi>."""
    psi = np.asarray(psi, dtype=complex)
    norm_sq = float(np.vdot(psi, psi).real)
    if norm_sq == 0.0:
        raise ValueError("cannot build a density matrix from the zero vector")
    rho = np.outer(psi, psi.conj())
    if renormalize:
        rho = rho / norm_sq
    return rho


def partial_trace(rho, keep) -> np.ndarray:
    """Trace out the atoms not in ``keep`` (a subset of {1, 2, 3}).

    The reduced matrix keeps the surviving atoms in ascending order with the
    same g/e bit convention, and has the same trace as the input.
    """
    keep = sorted(set(keep))
    if not keep or len(keep) >= 3:
        raise ValueError(f"keep must be a nonempty proper subset of atoms, got {keep!r}")
    if any(a not in ATOMS for a in keep):
        raise ValueError(f"unknown atom in keep: {keep!r}")
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (DIM, DIM):
        raise ValueError(f"expected an 8x8 density matrix, got shape {rho.shape}")

    tensor = rho.reshape([2] * 6)  # indices (a1, a2, a3, b1, b2, b3)
    subs = [0, 1, 2, 3, 4, 5]
    for atom in ATOMS:
        if atom not in keep:
            subs[atom - 1 + 3] = subs[atom - 1]  # contract bra with ket index
    out = [subs[a - 1] for a in keep] + [subs[a - 1 + 3] for a in keep]
    reduced = np.einsum(tensor, subs, out)
    d = 2 ** len(keep)
    return reduced.reshape(d, d)
