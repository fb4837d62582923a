"""Timed pulse programs and their interpreter.

A program is an ordered list of control segments, each selecting one
Hamiltonian family for a fixed duration.  Two canonical generators are
provided: the entanglement-transfer sequence (two or three quarter-period
pulses on alternating atoms) and the controlled-NOT construction (one pulse
on the target atom followed by a dispersive-shift wait on the control atom
that cancels the leftover -i phase).

Durations are stored as dimensionless times in the global reference unit;
``duration_unit`` tags which inverse rate produced the number (drive rate for
control pulses, Stark strength for shift segments) so totals can be reported
per family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from . import model, qstate
from .errors import NumericalGuardError
from .evolve import EXACT, PropagatorSpec, propagate, propagate_conditional, success_probability

SECULAR = "secular"
ISING_FULL = "ising-full"
DISSIPATIVE = "dissipative-secular"
STARK = "stark"
FAMILIES = (SECULAR, ISING_FULL, DISSIPATIVE, STARK)

UNIT_OMEGA = "inverse-omega0"
UNIT_CHI = "inverse-chi"
UNITS = (UNIT_OMEGA, UNIT_CHI)


@dataclass(frozen=True)
class PulseSegment:
    """One control segment: which Hamiltonian family acts, with what knobs,
    for how long.  Exactly the fields of the chosen family may be set."""

    family: str
    duration: float
    omega: tuple = (0.0, 0.0, 0.0)
    j_coupling: float | None = None
    gamma_spont: float | None = None
    stark_atom: int | None = None
    chi: float | None = None
    duration_unit: str = UNIT_OMEGA

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown segment family {self.family!r}")
        if self.duration_unit not in UNITS:
            raise ValueError(f"unknown duration unit {self.duration_unit!r}")
        if not self.duration > 0:
            raise ValueError(f"segment duration must be positive, got {self.duration}")
        object.__setattr__(self, "omega", tuple(float(w) for w in self.omega))
        if len(self.omega) != 3 or any(w < 0 for w in self.omega):
            raise ValueError(f"omega must be three nonnegative rates, got {self.omega!r}")

        want = {
            SECULAR: (),
            ISING_FULL: ("j_coupling",),
            DISSIPATIVE: ("gamma_spont",),
            STARK: ("stark_atom", "chi"),
        }[self.family]
        for name in ("j_coupling", "gamma_spont", "stark_atom", "chi"):
            value = getattr(self, name)
            if name in want and value is None:
                raise ValueError(f"{self.family} segment requires {name}")
            if name not in want and value is not None:
                raise ValueError(f"{self.family} segment does not take {name}")
        if self.family == STARK:
            if any(self.omega):
                raise ValueError("stark segment must have all drives off")
            if self.stark_atom not in qstate.ATOMS:
                raise ValueError(f"stark_atom must be 1, 2 or 3, got {self.stark_atom}")
        if self.family == ISING_FULL and self.j_coupling < 0:
            raise ValueError(f"j_coupling must be nonnegative, got {self.j_coupling}")
        if self.family == DISSIPATIVE and self.gamma_spont < 0:
            raise ValueError(f"gamma_spont must be nonnegative, got {self.gamma_spont}")


@dataclass(frozen=True)
class PulseProgram:
    """Ordered control segments plus a human-readable label."""

    segments: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    def total_time(self) -> dict:
        """Summed durations keyed by duration unit."""
        totals = {unit: 0.0 for unit in UNITS}
        for seg in self.segments:
            totals[seg.duration_unit] += seg.duration
        return totals

    def duration(self) -> float:
        """Grand total duration in the global dimensionless time unit."""
        return sum(seg.duration for seg in self.segments)


class ProgramResult(NamedTuple):
    final: np.ndarray
    trajectory: list
    success_prob: float


@dataclass(frozen=True)
class GateMatrix:
    """4x4 gate on (control, target) with the spectator atom held in |g>."""

    entries: np.ndarray
    leakage: float


def segment_hamiltonian(seg: PulseSegment) -> np.ndarray:
    if seg.family == SECULAR:
        return model.secular_hamiltonian(model.ControlConfig(omega=seg.omega))
    if seg.family == ISING_FULL:
        return model.ising_hamiltonian(
            model.ControlConfig(omega=seg.omega, j_coupling=seg.j_coupling)
        )
    if seg.family == DISSIPATIVE:
        return model.dissipative_hamiltonian(
            model.ControlConfig(omega=seg.omega, gamma_spont=seg.gamma_spont)
        )
    return model.stark_hamiltonian(seg.chi, seg.stark_atom)


def transfer_program(omega0: float, steps: int = 3) -> PulseProgram:
    """Entanglement-transfer sequence: quarter-period pulses on atoms 1, 3, 1.

    With steps=3 the first atom is returned to its ground state and the total
    time is 3*pi/(2*omega0); steps=2 drops the final pulse (total pi/omega0),
    leaving the first atom excited.
    """
    if not omega0 > 0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    if steps not in (2, 3):
        raise ValueError(f"steps must be 2 or 3, got {steps}")
    pulse_time = math.pi / (2.0 * omega0)
    segments = []
    for atom in (1, 3, 1)[:steps]:
        omega = [0.0, 0.0, 0.0]
        omega[atom - 1] = omega0
        segments.append(PulseSegment(SECULAR, pulse_time, omega=tuple(omega)))
    return PulseProgram(tuple(segments), label=f"transfer-{steps}step")


def cnot_program(omega0: float, delta: float, g_ac: float) -> PulseProgram:
    """Controlled-NOT between atoms 1 (control) and 2 (target), atom 3 idle.

    Segment 1 flips the target conditionally (quarter-period pulse on atom 2);
    segment 2 lets the dispersive shift chi = g^2/delta act on atom 1 for
    3*pi/(2*chi), turning the leftover -i into +1.  Dropping segment 2 yields
    the phase-defective controlled-U variant.
    """
    if not (omega0 > 0 and delta > 0 and g_ac > 0):
        raise ValueError("omega0, delta and g_ac must all be positive")
    chi = g_ac ** 2 / delta
    pulse = PulseSegment(SECULAR, math.pi / (2.0 * omega0), omega=(0.0, omega0, 0.0))
    shift = PulseSegment(
        STARK,
        3.0 * math.pi / (2.0 * chi),
        stark_atom=1,
        chi=chi,
        duration_unit=UNIT_CHI,
    )
    return PulseProgram((pulse, shift), label="cnot-1-2")


def with_dissipation(program: PulseProgram, gamma_spont: float) -> PulseProgram:
    """Replace every drive segment by its decaying counterpart at rate gamma."""
    if gamma_spont < 0:
        raise ValueError(f"gamma_spont must be nonnegative, got {gamma_spont}")
    segments = []
    for seg in program.segments:
        if seg.family != SECULAR:
            raise ValueError(f"only secular segments accept a decay rate, got {seg.family!r}")
        segments.append(
            PulseSegment(
                DISSIPATIVE,
                seg.duration,
                omega=seg.omega,
                gamma_spont=gamma_spont,
                duration_unit=seg.duration_unit,
            )
        )
    return PulseProgram(tuple(segments), label=f"{program.label}+decay")


def permute_atoms(program: PulseProgram, perm) -> PulseProgram:
    """Relabel the atoms of a program: ``perm[i-1]`` is the new label of atom i.

    This is how the analogous sequences for other atom pairs are produced:
    one code path, relabel instead of hand-written tables.
    """
    perm = tuple(perm)
    if sorted(perm) != [1, 2, 3]:
        raise ValueError(f"not a permutation of (1, 2, 3): {perm!r}")
    segments = []
    for seg in program.segments:
        omega = [0.0, 0.0, 0.0]
        for i in range(3):
            omega[perm[i] - 1] = seg.omega[i]
        changes = {"omega": tuple(omega)}
        if seg.stark_atom is not None:
            changes["stark_atom"] = perm[seg.stark_atom - 1]
        segments.append(replace(seg, **changes))
    return PulseProgram(tuple(segments), label=f"{program.label}@{perm}")


def run_program(
    program: PulseProgram,
    psi0,
    method: str = EXACT,
    step_count: int | None = None,
) -> ProgramResult:
    """Apply the segments in order; the trajectory holds the state after each.

    The result is a pure function of its arguments: repeated runs are
    bit-identical.  Propagation failures carry the offending segment index.
    """
    state = np.ascontiguousarray(psi0, dtype=complex)
    trajectory = []
    for index, seg in enumerate(program.segments, start=1):
        stepper = propagate_conditional if seg.family == DISSIPATIVE else propagate
        try:
            spec = PropagatorSpec(segment_hamiltonian(seg), seg.duration, method, step_count)
            state = stepper(spec, state)
        except (ValueError, NumericalGuardError) as exc:
            raise type(exc)(f"segment {index} ({seg.family}): {exc}") from exc
        trajectory.append(state)
    return ProgramResult(state, trajectory, success_probability(state))


def extract_gate_matrix(program: PulseProgram, control: int = 1, target: int = 2) -> GateMatrix:
    """Run the four (control, target) basis inputs with the spectator in |g>
    and read off the effective two-qubit gate.

    Columns follow the input order |gg>, |ge>, |eg>, |ee>.  Amplitude leaking
    out of the spectator-ground subspace beyond 1e-9 is an error; the largest
    observed leakage is reported on the result.
    """
    if control not in qstate.ATOMS or target not in qstate.ATOMS or control == target:
        raise ValueError(f"control and target must be distinct atoms, got {control}, {target}")
    spectator = ({1, 2, 3} - {control, target}).pop()

    entries = np.zeros((4, 4), dtype=complex)
    worst_leakage = 0.0
    for col, (cbit, tbit) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        labels = {control: "ge"[cbit], target: "ge"[tbit], spectator: "g"}
        psi0 = qstate.basis_state(labels[1] + labels[2] + labels[3])
        final = run_program(program, psi0).final
        total = success_probability(final)
        for row, (ocbit, otbit) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
            out_labels = {control: "ge"[ocbit], target: "ge"[otbit], spectator: "g"}
            entries[row, col] = final[qstate.basis_index(out_labels[1] + out_labels[2] + out_labels[3])]
        kept = float(np.vdot(entries[:, col], entries[:, col]).real)
        leakage = (total - kept) / total if total > 0 else 0.0
        worst_leakage = max(worst_leakage, leakage)
        if leakage > 1e-9:
            raise NumericalGuardError(
                f"input {'ge'[cbit]}{'ge'[tbit]}: population leaked off the spectator "
                f"ground subspace ({leakage:.3e} > 1e-9)"
            )
    return GateMatrix(entries=entries, leakage=worst_leakage)


def rwa_deviation(omega0_over_j: float, program: PulseProgram, psi0) -> float:
    """Infidelity between the rotating-wave-reduced program and the same
    program rerun under the full spin model with J = omega0 / ratio.

    The drive rate omega0 is taken from the program's own segments.  The
    result shrinks as the ratio does, quantifying the reduction's validity.
    """
    if not omega0_over_j > 0:
        raise ValueError(f"ratio must be positive, got {omega0_over_j}")
    if any(seg.family != SECULAR for seg in program.segments):
        raise ValueError("rwa_deviation expects a program of secular segments")
    omega0 = max((max(seg.omega) for seg in program.segments), default=0.0)
    if omega0 == 0.0:
        return 0.0
    j_coupling = omega0 / omega0_over_j
    full_segments = tuple(
        PulseSegment(
            ISING_FULL,
            seg.duration,
            omega=seg.omega,
            j_coupling=j_coupling,
            duration_unit=seg.duration_unit,
        )
        for seg in program.segments
    )
    full = PulseProgram(full_segments, label=f"{program.label}+zz")
    reduced_final = run_program(program, psi0).final
    full_final = run_program(full, psi0).final
    reduced_final = reduced_final / np.linalg.norm(reduced_final)
    full_final = full_final / np.linalg.norm(full_final)
    return qstate.phase_invariant_infidelity(reduced_final, full_final)


# ---------------------------------------------------------------------------
# line-oriented text form: one segment per line,
#   family omega1 omega2 omega3 duration unit [key=value ...]
# Floats are written with repr() so a parse/emit round trip is bit-stable.
# ---------------------------------------------------------------------------

def format_program(program: PulseProgram) -> str:
    lines = []
    if program.label:
        lines.append(f"# label: {program.label}")
    for seg in program.segments:
        parts = [seg.family]
        parts += [repr(float(w)) for w in seg.omega]
        parts.append(repr(float(seg.duration)))
        parts.append(seg.duration_unit)
        if seg.family == ISING_FULL:
            parts.append(f"j={float(seg.j_coupling)!r}")
        elif seg.family == DISSIPATIVE:
            parts.append(f"gamma={float(seg.gamma_spont)!r}")
        elif seg.family == STARK:
            parts.append(f"atom={seg.stark_atom}")
            parts.append(f"chi={float(seg.chi)!r}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_program(text: str) -> PulseProgram:
    label = ""
    segments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comment = line[1:].strip()
            if comment.startswith("label:"):
                label = comment[len("label:"):].strip()
            continue
        fields = line.split()
        if len(fields) < 6:
            raise ValueError(f"line {lineno}: expected at least 6 fields, got {len(fields)}")
        family = fields[0]
        if family not in FAMILIES:
            raise ValueError(f"line {lineno}: unknown family {family!r}")
        try:
            omega = tuple(float(x) for x in fields[1:4])
            duration = float(fields[4])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        unit = fields[5]
        extras = {}
        for token in fields[6:]:
            if "=" not in token:
                raise ValueError(f"line {lineno}: malformed extra {token!r}")
            key, value = token.split("=", 1)
            extras[key] = value
        kwargs = {"omega": omega, "duration_unit": unit}
        try:
            if family == ISING_FULL:
                kwargs["j_coupling"] = float(extras.pop("j"))
            elif family == DISSIPATIVE:
                kwargs["gamma_spont"] = float(extras.pop("gamma"))
            elif family == STARK:
                kwargs["stark_atom"] = int(extras.pop("atom"))
                kwargs["chi"] = float(extras.pop("chi"))
        except KeyError as exc:
            raise ValueError(f"line {lineno}: {family} segment missing extra {exc}") from None
        if extras:
            raise ValueError(f"line {lineno}: unexpected extras {sorted(extras)}")
        try:
            segments.append(PulseSegment(family, duration, **kwargs))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return PulseProgram(tuple(segments), label=label)
