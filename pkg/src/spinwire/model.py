"""Hamiltonian builders for the driven three-atom chain, and the fiber-mediated
spin-spin coupling strength computed from cavity/fiber parameters.

All control-level quantities (Rabi rates, the coupling J, decay rates) are in
units of a reference drive rate Omega0 = 1; times elsewhere are multiples of
1/Omega0.  Physical-level quantities (kappa, delta, ...) share one angular
frequency unit chosen by the caller; converting the physical J into a
control-level coupling is the caller's explicit step.
"""
from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericalGuardError
from .qstate import ATOMS, DIM

# neighbours (j, k) of atom i, cyclic
_PARTNERS = {1: (2, 3), 2: (3, 1), 3: (1, 2)}
_MASK = {1: 4, 2: 2, 3: 1}

J_DENOMINATOR_MODES = ("grouped", "literal")
LOSS_RULES = ("every-hop", "w-cubed-only")


@dataclass(frozen=True)
class PhysicalParams:
    """Cavity and fiber constants from which the coupling strength derives.

    kappa: cavity leak rate; delta: atom-cavity detuning; g_ac: atom-cavity
    coupling; epsilon: cavity drive amplitude; phi: fiber phase delay per hop
    (radians); gamma_fiber: fiber decay per meter; length: fiber length (m).
    """

    kappa: float
    delta: float
    g_ac: float
    epsilon: float
    phi: float = 0.0
    gamma_fiber: float = 0.0
    length: float = 0.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.g_ac <= 0:
            raise ValueError(f"g_ac must be positive, got {self.g_ac}")
        if self.delta == 0:
            raise ValueError("delta must be nonzero (the Stark strength is g^2/delta)")
        if self.length < 0:
            raise ValueError(f"length must be >= 0, got {self.length}")
        if self.gamma_fiber < 0:
            raise ValueError(f"gamma_fiber must be >= 0, got {self.gamma_fiber}")
        if self.delta < 10 * self.g_ac:
            warnings.warn(
                f"delta = {self.delta} is below 10*g_ac = {10 * self.g_ac}: "
                "outside the dispersive regime, derived quantities are suspect",
                stacklevel=2,
            )


@dataclass(frozen=True)
class ControlConfig:
    """Control-level knobs: per-atom Rabi rates, spin coupling, decay rate."""

    omega: tuple = (0.0, 0.0, 0.0)
    j_coupling: float = 0.0
    gamma_spont: float = 0.0

    def __post_init__(self):
        if len(self.omega) != 3:
            raise ValueError(f"omega must have three entries, got {self.omega!r}")
        if any(w < 0 for w in self.omega):
            raise ValueError(f"Rabi rates must be nonnegative, got {self.omega!r}")
        if self.j_coupling < 0:
            raise ValueError(f"j_coupling must be nonnegative, got {self.j_coupling}")
        if self.gamma_spont < 0:
            raise ValueError(f"gamma_spont must be nonnegative, got {self.gamma_spont}")


@dataclass(frozen=True)
class DerivedFieldQuantities:
    """Intermediate quantities of the coupling-strength formula."""

    chi: float            # Stark strength g^2/delta
    m_complex: complex    # M = i*delta + kappa
    w_cubed: complex      # kappa^3 * (loss-modified phase factor)^3
    alpha_field: complex  # steady cavity field amplitude
    j_value: float        # resulting spin-spin coupling


def _bits(index):
    return ((index >> 2) & 1, (index >> 1) & 1, index & 1)


def secular_hamiltonian(cfg: ControlConfig) -> np.ndarray:
    """Drive Hamiltonian surviving the rotating-wave average.

    Atom i is flipped at rate omega_i only while its two partner atoms are
    anti-aligned; states whose partners agree are left untouched.  Matrix
    elements are built directly from the basis-index bit logic.
    """
    h = np.zeros((DIM, DIM), dtype=complex)
    for col in range(DIM):
        b = _bits(col)
        for i in ATOMS:
            w = cfg.omega[i - 1]
            if w == 0.0:
                continue
            j, k = _PARTNERS[i]
            if b[j - 1] != b[k - 1]:
                h[col ^ _MASK[i], col] += w
    return h


def ising_hamiltonian(cfg: ControlConfig) -> np.ndarray:
    """Full spin model: pairwise z-z coupling J on all three pairs plus the
    bare transverse drives.  Warns when the drive is too strong for the
    rotating-wave reduction to be trusted (max omega > J/10)."""
    if any(cfg.omega) and max(cfg.omega) > cfg.j_coupling / 10.0:
        warnings.warn(
            f"max Rabi rate {max(cfg.omega)} exceeds J/10 = {cfg.j_coupling / 10.0}; "
            "the secular reduction is unreliable here",
            stacklevel=2,
        )
    h = np.zeros((DIM, DIM), dtype=complex)
    for col in range(DIM):
        b = _bits(col)
        z = [2 * x - 1 for x in b]
        h[col, col] = cfg.j_coupling * (z[0] * z[1] + z[1] * z[2] + z[0] * z[2])
        for i in ATOMS:
            w = cfg.omega[i - 1]
            if w != 0.0:
                h[col ^ _MASK[i], col] += w
    return h


def dissipative_hamiltonian(cfg: ControlConfig) -> np.ndarray:
    """Conditional (non-Hermitian) Hamiltonian: the secular drive minus
    i*gamma times the excitation-number diagonal.  The norm of a state evolved
    under it decays with the number of excited atoms; no quantum jumps."""
    h = secular_hamiltonian(cfg)
    for idx in range(DIM):
        h[idx, idx] += -1j * cfg.gamma_spont * sum(_bits(idx))
    return h


def stark_hamiltonian(chi: float, atom: int) -> np.ndarray:
    """Dispersive energy shift chi on the excited state of one atom."""
    if atom not in ATOMS:
        raise ValueError(f"atom index must be 1, 2 or 3, got {atom}")
    h = np.zeros((DIM, DIM), dtype=complex)
    for idx in range(DIM):
        if (idx >> (3 - atom)) & 1:
            h[idx, idx] = chi
    return h


def fiber_loss_factor(phi: float, gamma_fiber: float, length: float) -> complex:
    """Per-hop fiber factor exp(i*phi - gamma*L): phase delay plus attenuation."""
    if length < 0:
        raise ValueError(f"length must be >= 0, got {length}")
    return cmath.exp(1j * phi - gamma_fiber * length)


def derive_field_quantities(
    params: PhysicalParams,
    j_denominator: str = "grouped",
    loss_rule: str = "every-hop",
) -> DerivedFieldQuantities:
    """Evaluate chi, M, W^3, the steady cavity amplitude and the coupling J.

    ``j_denominator`` selects how the typeset formula is grouped: "grouped"
    reads both denominators as (M^3 - W^3); "literal" reads ".../M^3 - W^3"
    as a division by M^3 followed by subtracting W^3.

    ``loss_rule`` controls where fiber attenuation enters: "every-hop"
    replaces each k-hop phase factor e^{i k phi} by e^{k(i phi - gamma L)}
    (a k-hop term transits k fibers); "w-cubed-only" attenuates only the
    three-hop round-trip term W^3.
    """
    if j_denominator not in J_DENOMINATOR_MODES:
        raise ValueError(f"j_denominator must be one of {J_DENOMINATOR_MODES}, got {j_denominator!r}")
    if loss_rule not in LOSS_RULES:
        raise ValueError(f"loss_rule must be one of {LOSS_RULES}, got {loss_rule!r}")

    kappa = params.kappa
    chi = params.g_ac ** 2 / params.delta
    m = 1j * params.delta + kappa

    lossy = fiber_loss_factor(params.phi, params.gamma_fiber, params.length)
    if loss_rule == "every-hop":
        f1, f2, f3 = lossy, lossy ** 2, lossy ** 3
    else:
        lossless = cmath.exp(1j * params.phi)
        f1, f2, f3 = lossless, lossless ** 2, lossy ** 3
    w3 = kappa ** 3 * f3

    alpha_num = m * m + m * kappa * f1 + kappa * kappa * f2
    core_num = m * f1 + kappa * f2

    if j_denominator == "grouped":
        den = m ** 3 - w3
        if abs(den) <= 1e-12 * abs(m) ** 3:
            raise NumericalGuardError(
                f"resonant denominator: |M^3 - W^3| = {abs(den):.3e} "
                f"<= 1e-12 * |M|^3 = {1e-12 * abs(m) ** 3:.3e}"
            )
        alpha = params.epsilon * alpha_num / den
        core = core_num / den
    else:
        den = m ** 3  # |M| >= kappa > 0, never resonant
        alpha = params.epsilon * (alpha_num / den - w3)
        core = core_num / den - w3

    j_value = 2.0 * kappa * chi ** 2 * (abs(alpha) ** 2 * core).imag
    return DerivedFieldQuantities(
        chi=chi, m_complex=m, w_cubed=w3, alpha_field=alpha, j_value=float(j_value)
    )


def coupling_strength(
    params: PhysicalParams,
    j_denominator: str = "grouped",
    loss_rule: str = "every-hop",
) -> float:
    """Spin-spin coupling strength J for the given cavity/fiber parameters."""
    return derive_field_quantities(params, j_denominator, loss_rule).j_value
