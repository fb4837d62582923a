"""Basis conventions, Pauli embeddings, phase-blind comparison, partial trace."""
import itertools

import numpy as np
import pytest

from spinwire import qstate

from helpers import embed, random_state, SPLUS, SMINUS, SX, SZ


class TestBasisIndex:
    def test_examples(self):
        assert qstate.basis_index(("g", "g", "g")) == 0
        assert qstate.basis_index(("e", "g", "g")) == 4
        assert qstate.basis_index(("g", "e", "g")) == 2

    def test_string_form(self):
        assert qstate.basis_index("geg") == 2
        assert qstate.basis_index("eee") == 7

    def test_bijection(self):
        triples = list(itertools.product("ge", repeat=3))
        indices = {qstate.basis_index(t) for t in triples}
        assert indices == set(range(8))

    def test_label_roundtrip(self):
        for idx in range(8):
            assert qstate.basis_index(qstate.basis_label(idx)) == idx

    def test_rejects_bad_labels(self):
        with pytest.raises(ValueError):
            qstate.basis_index("gex")
        with pytest.raises(ValueError):
            qstate.basis_index("ge")
        with pytest.raises(ValueError):
            qstate.basis_label(8)


class TestPauliOn:
    def test_z_sign_convention(self):
        egg = qstate.basis_state("egg")
        np.testing.assert_allclose(qstate.pauli_on("z", 1) @ egg, egg, atol=1e-15)
        np.testing.assert_allclose(qstate.pauli_on("z", 2) @ egg, -egg, atol=1e-15)

    def test_x_flips(self):
        np.testing.assert_allclose(
            qstate.pauli_on("x", 1) @ qstate.basis_state("ggg"),
            qstate.basis_state("egg"), atol=1e-15,
        )

    def test_ladder_operators(self):
        plus1 = qstate.pauli_on("plus", 1)
        np.testing.assert_allclose(plus1 @ qstate.basis_state("ggg"),
                                   qstate.basis_state("egg"), atol=1e-15)
        np.testing.assert_allclose(plus1 @ qstate.basis_state("egg"),
                                   np.zeros(8), atol=1e-15)

    def test_matches_tensor_embedding(self):
        for which, single in (("x", SX), ("z", SZ), ("plus", SPLUS), ("minus", SMINUS)):
            for atom in (1, 2, 3):
                np.testing.assert_allclose(
                    qstate.pauli_on(which, atom), embed(single, atom), atol=1e-15
                )

    def test_commutators(self):
        # distinct atoms commute; same-atom x/z close on the y generator
        for i, j in itertools.permutations((1, 2, 3), 2):
            zi, zj = qstate.pauli_on("z", i), qstate.pauli_on("z", j)
            np.testing.assert_allclose(zi @ zj - zj @ zi, np.zeros((8, 8)), atol=1e-12)
        for i in (1, 2, 3):
            x, z = qstate.pauli_on("x", i), qstate.pauli_on("z", i)
            y = -1j * (qstate.pauli_on("plus", i) - qstate.pauli_on("minus", i))
            np.testing.assert_allclose(x @ z - z @ x, -2j * y, atol=1e-12)

    def test_atom_range(self):
        with pytest.raises(ValueError):
            qstate.pauli_on("x", 4)
        with pytest.raises(ValueError):
            qstate.pauli_on("y", 1)


class TestPhaseInvariantInfidelity:
    def test_global_phase_is_free(self):
        psi = random_state(np.random.default_rng(1))
        assert qstate.phase_invariant_infidelity(psi, 1j * psi) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal(self):
        assert qstate.phase_invariant_infidelity(
            qstate.basis_state("geg"), qstate.basis_state("eeg")
        ) == pytest.approx(1.0)

    def test_half_overlap(self):
        # |<geg| (|geg> - i|eeg>)/sqrt(2)|^2 = 1/2
        mixed = (qstate.basis_state("geg") - 1j * qstate.basis_state("eeg")) / np.sqrt(2)
        assert qstate.phase_invariant_infidelity(
            qstate.basis_state("geg"), mixed
        ) == pytest.approx(0.5, abs=1e-12)

    def test_symmetry_and_zero_iff_phase(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            a, b = random_state(rng), random_state(rng)
            ab = qstate.phase_invariant_infidelity(a, b)
            ba = qstate.phase_invariant_infidelity(b, a)
            assert ab == pytest.approx(ba, abs=1e-12)
            assert 0.0 <= ab <= 1.0
            phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
            assert qstate.phase_invariant_infidelity(a, phase * a) == pytest.approx(0.0, abs=1e-12)

    def test_rejects_unnormalized(self):
        psi = qstate.basis_state("ggg")
        with pytest.raises(ValueError, match="not normalized"):
            qstate.phase_invariant_infidelity(0.9 * psi, psi)


class TestDensityFrom:
    def test_pure_projector(self):
        rho = qstate.density_from(qstate.basis_state("ggg"))
        expected = np.zeros((8, 8), dtype=complex)
        expected[0, 0] = 1.0
        np.testing.assert_allclose(rho, expected, atol=1e-15)

    def test_trace_tracks_norm(self):
        scaled = 0.8 * qstate.basis_state("ggg")
        assert np.trace(qstate.density_from(scaled)).real == pytest.approx(0.64)
        assert np.trace(qstate.density_from(scaled, renormalize=True)).real == pytest.approx(1.0)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="zero vector"):
            qstate.density_from(np.zeros(8, dtype=complex))

    def test_hermitian_psd(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            rho = qstate.density_from(random_state(rng))
            np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
            assert np.linalg.eigvalsh(rho).min() > -1e-10


class TestPartialTrace:
    def test_product_state(self):
        rho = qstate.density_from(qstate.basis_state("geg"))
        reduced = qstate.partial_trace(rho, keep={2, 3})
        expected = np.zeros((4, 4), dtype=complex)
        expected[2, 2] = 1.0  # |eg> of atoms (2, 3)
        np.testing.assert_allclose(reduced, expected, atol=1e-14)

    def test_bell_reduction(self):
        # (|ge> + |eg>)/sqrt(2) on atoms (2, 3), atom 1 ground
        psi = (qstate.basis_state("geg") + qstate.basis_state("gge")) / np.sqrt(2)
        reduced = qstate.partial_trace(qstate.density_from(psi), keep={2})
        np.testing.assert_allclose(reduced, np.eye(2) / 2, atol=1e-14)

    def test_transfer_output_is_pure_on_target_pair(self):
        # the three-pulse transfer at theta = pi/4 leaves atoms (2, 3) in a
        # pure entangled state while atom 1 returns to its ground state
        from spinwire.programs import run_program, transfer_program

        theta = np.pi / 4
        psi0 = np.cos(theta) * qstate.basis_state("egg") + np.sin(theta) * qstate.basis_state("geg")
        final = run_program(transfer_program(1.0, 3), psi0).final
        rho23 = qstate.partial_trace(qstate.density_from(final), keep={2, 3})
        assert np.trace(rho23 @ rho23).real == pytest.approx(1.0, abs=1e-10)

    def test_trace_preserved(self):
        rng = np.random.default_rng(11)
        rho = 0.3 * qstate.density_from(random_state(rng)) + 0.7 * qstate.density_from(random_state(rng))
        for keep in ({1}, {2}, {3}, {1, 2}, {2, 3}, {1, 3}):
            reduced = qstate.partial_trace(rho, keep)
            assert np.trace(reduced).real == pytest.approx(np.trace(rho).real, abs=1e-12)
            np.testing.assert_allclose(reduced, reduced.conj().T, atol=1e-12)

    def test_rejects_degenerate_subsets(self):
        rho = qstate.density_from(qstate.basis_state("ggg"))
        with pytest.raises(ValueError):
            qstate.partial_trace(rho, keep=set())
        with pytest.raises(ValueError):
            qstate.partial_trace(rho, keep={1, 2, 3})
        with pytest.raises(ValueError):
            qstate.partial_trace(rho, keep={4})


class TestAtomPermutation:
    def test_relabels_basis_states(self):
        perm = (2, 3, 1)  # atom 1 -> 2, atom 2 -> 3, atom 3 -> 1
        p = qstate.atom_permutation_matrix(perm)
        out = p @ qstate.basis_state("egg")
        np.testing.assert_allclose(out, qstate.basis_state("geg"), atol=1e-15)

    def test_unitary(self):
        for perm in itertools.permutations((1, 2, 3)):
            p = qstate.atom_permutation_matrix(perm)
            np.testing.assert_allclose(p @ p.conj().T, np.eye(8), atol=1e-15)

    def test_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            qstate.atom_permutation_matrix((1, 1, 2))
