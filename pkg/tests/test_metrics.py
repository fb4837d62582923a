"""Hilbert-Schmidt distance and the angle-averaged transfer fidelity."""
import math

import numpy as np
import pytest

from spinwire import qstate
from spinwire.errors import NumericalGuardError
from spinwire.metrics import (
    FidelityTask,
    average_fidelity,
    averaged_metrics,
    hs_distance_sq,
    pointwise_fidelity,
    transfer_fidelity_task,
    transfer_target,
)
from spinwire.programs import transfer_program

from helpers import random_state

# Frozen regression values for the default two-pulse task, drive rate 1:
# computed twice with independent oracles (tensor-product + scipy expm route
# and a plain-python RK4 route), agreeing to 1e-12 at 64..512 Simpson nodes.
AVG_RENORMALIZED = {0.05: 0.9985549908896093, 0.1: 0.9940265640904997}
AVG_UNNORMALIZED = {0.05: 0.9289160094384507, 0.1: 0.8146555974611647}
AVG_SUCCESS = {0.05: 0.6269688462304359, 0.1: 0.3966126181040787}
POINTWISE_HALF_PI = {0.1: 0.996834265706394}  # renormalized, gamma = 0.1


def decayed_two_level_pulse(gamma):
    """Closed-form quarter-period amplitudes of the damped two-level block
    [[-i*gamma, 1], [1, -2i*gamma]]: (stay, flip) components at t = pi/2."""
    omega_p = math.sqrt(1.0 - gamma ** 2 / 4.0)
    phase = math.exp(-3.0 * gamma * math.pi / 4.0)
    angle = omega_p * math.pi / 2.0
    stay = phase * (math.cos(angle) + (gamma / 2.0) * math.sin(angle) / omega_p)
    flip = -1j * phase * math.sin(angle) / omega_p
    return stay, flip


class TestHsDistance:
    def test_identical(self):
        rho = qstate.density_from(qstate.basis_state("geg"))
        assert hs_distance_sq(rho, rho) == pytest.approx(0.0, abs=1e-15)

    def test_orthogonal_pure_states(self):
        a = qstate.density_from(qstate.basis_state("geg"))
        b = qstate.density_from(qstate.basis_state("eeg"))
        assert hs_distance_sq(a, b) == pytest.approx(2.0, abs=1e-14)

    def test_overlap_relation(self):
        # pure states with |<a|b>|^2 = f give Tr[(rho_a - rho_b)^2] = 2(1 - f)
        rng = np.random.default_rng(9)
        for _ in range(10):
            a, b = random_state(rng), random_state(rng)
            f = abs(np.vdot(a, b)) ** 2
            value = hs_distance_sq(qstate.density_from(a), qstate.density_from(b))
            assert value == pytest.approx(2.0 * (1.0 - f), abs=1e-12)
        half = (qstate.basis_state("geg") - 1j * qstate.basis_state("eeg")) / math.sqrt(2)
        value = hs_distance_sq(
            qstate.density_from(qstate.basis_state("geg")), qstate.density_from(half)
        )
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_symmetry_nonnegativity(self):
        rng = np.random.default_rng(10)
        a = qstate.density_from(random_state(rng))
        b = qstate.density_from(random_state(rng))
        assert hs_distance_sq(a, b) == pytest.approx(hs_distance_sq(b, a), abs=1e-14)
        assert hs_distance_sq(a, b) >= 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            hs_distance_sq(np.eye(8), np.eye(4))


class TestFidelityTask:
    def test_node_requirements(self):
        prog = transfer_program(1.0, 2)
        target = lambda theta: transfer_target(theta, 2)
        with pytest.raises(ValueError):
            FidelityTask(0.0, prog, target, theta_nodes=8)
        with pytest.raises(ValueError):
            FidelityTask(0.0, prog, target, theta_nodes=65)
        with pytest.raises(ValueError):
            FidelityTask(0.0, prog, target, normalization="renormalised")
        with pytest.raises(ValueError):
            FidelityTask(-0.1, prog, target)

    def test_factory_wires_matching_target(self):
        for steps in (2, 3):
            task = transfer_fidelity_task(0.0, steps=steps)
            assert len(task.program.segments) == steps
            target = task.target_builder(0.3)
            assert np.linalg.norm(target) == pytest.approx(1.0, abs=1e-12)


class TestPointwiseFidelity:
    def test_perfect_without_decay(self):
        for steps in (2, 3):
            task = transfer_fidelity_task(0.0, steps=steps)
            for theta in (0.0, 0.4, math.pi / 2, 2.2):
                assert pointwise_fidelity(task, theta) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("gamma", [0.05, 0.1])
    def test_alpha_only_input_closed_form(self, gamma):
        # theta = 0: the input |egg> idles (decaying) through pulse 1, then
        # rides the damped two-level block through pulse 2
        stay, flip = decayed_two_level_pulse(gamma)
        idle = math.exp(-gamma * math.pi / 2.0)
        expected_renorm = abs(flip) ** 2 / (abs(stay) ** 2 + abs(flip) ** 2)
        success = idle ** 2 * (abs(stay) ** 2 + abs(flip) ** 2)
        overlap_sq = idle ** 2 * abs(flip) ** 2
        expected_unnorm = 1.0 - (success ** 2 + 1.0 - 2.0 * overlap_sq) / 2.0

        renorm = transfer_fidelity_task(gamma, normalization="conditional-renormalized")
        unnorm = transfer_fidelity_task(gamma, normalization="unnormalized")
        assert pointwise_fidelity(renorm, 0.0) == pytest.approx(expected_renorm, abs=1e-10)
        assert pointwise_fidelity(unnorm, 0.0) == pytest.approx(expected_unnorm, abs=1e-10)

    def test_beta_only_frozen(self):
        task = transfer_fidelity_task(0.1)
        assert pointwise_fidelity(task, math.pi / 2) == pytest.approx(
            POINTWISE_HALF_PI[0.1], abs=1e-9
        )

    def test_periodicity(self):
        task = transfer_fidelity_task(0.08)
        for theta in (0.3, 1.1):
            full_turn = pointwise_fidelity(task, theta + 2 * math.pi)
            assert full_turn == pytest.approx(pointwise_fidelity(task, theta), abs=1e-9)
            # a sign flip of the second coefficient is a relabeling: pi-periodic
            half_turn = pointwise_fidelity(task, theta + math.pi)
            assert half_turn == pytest.approx(pointwise_fidelity(task, theta), abs=1e-9)


class TestAverageFidelity:
    def test_no_decay_is_perfect(self):
        assert average_fidelity(transfer_fidelity_task(0.0)) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("gamma", [0.05, 0.1])
    def test_frozen_regression_renormalized(self, gamma):
        value = average_fidelity(transfer_fidelity_task(gamma))
        assert value == pytest.approx(AVG_RENORMALIZED[gamma], abs=1e-7)

    @pytest.mark.parametrize("gamma", [0.05, 0.1])
    def test_frozen_regression_unnormalized(self, gamma):
        task = transfer_fidelity_task(gamma, normalization="unnormalized")
        assert average_fidelity(task) == pytest.approx(AVG_UNNORMALIZED[gamma], abs=1e-7)

    @pytest.mark.parametrize("gamma", [0.05, 0.1])
    def test_success_probability(self, gamma):
        metrics = averaged_metrics(transfer_fidelity_task(gamma))
        assert metrics.success_probability == pytest.approx(AVG_SUCCESS[gamma], abs=1e-7)
        assert metrics.theta_nodes >= 64

    def test_monotone_in_decay_rate(self):
        gammas = [0.01 * k for k in range(11)]
        values = [average_fidelity(transfer_fidelity_task(g)) for g in gammas]
        assert all(a >= b - 1e-10 for a, b in zip(values, values[1:]))

    def test_quadratic_deficit_scaling(self):
        # leading-order deficit is quadratic: deficit(0.1) / deficit(0.05) ~ 4
        d05 = 1.0 - average_fidelity(transfer_fidelity_task(0.05))
        d10 = 1.0 - average_fidelity(transfer_fidelity_task(0.1))
        assert d10 / d05 == pytest.approx(4.0, rel=0.25)

    def test_non_convergent_quadrature_guard(self):
        # a discontinuous target makes the Simpson average drift forever
        jagged = FidelityTask(
            gamma_spont=0.0,
            program=transfer_program(1.0, 2),
            target_builder=lambda theta: (
                qstate.basis_state("ege") if math.sin(theta) < 0.5 else qstate.basis_state("eeg")
            ),
            theta_nodes=16,
        )
        with pytest.raises(NumericalGuardError, match="did not converge"):
            average_fidelity(jagged)
