"""Command-line front end: five subcommands emitting deterministic CSV files.

Commands: ``transfer``, ``cnot``, ``fidelity-sweep``, ``coupling``,
``rwa-check``.  Configuration is a flat ``key = value`` text file with ``#``
comments; unknown keys are rejected.  Numeric CSV fields carry a fixed 12
significant digits and files always end lines with "\\n", so identical inputs
produce byte-identical outputs.  ``SPINWIRE_THREADS`` caps the sweep worker
count (0 = auto); the thread count never changes the emitted bytes.

Exit status: 0 on success, 1 on configuration errors, 2 when a numerical
guard trips (resonant denominator, non-convergent quadrature).
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import qstate
from .errors import ConfigError, NumericalGuardError
from .metrics import (
    NORMALIZATIONS,
    FidelityTask,
    averaged_metrics,
    transfer_target,
)
from .model import J_DENOMINATOR_MODES, PhysicalParams, coupling_strength
from .programs import (
    PulseProgram,
    format_program,
    parse_program,
    rwa_deviation,
    run_program,
    transfer_program,
    cnot_program,
    with_dissipation,
)

DEFAULT_RWA_RATIOS = (0.02, 0.05, 0.1, 0.2)

_FLOAT_KEYS = ("omega0", "gamma", "j", "kappa", "delta", "g", "epsilon",
               "phi", "gamma_fiber", "length")
_INT_KEYS = ("theta_nodes", "steps")
_CHOICE_KEYS = {"normalization": NORMALIZATIONS, "j_denominator": J_DENOMINATOR_MODES}


@dataclass(frozen=True)
class RunConfig:
    """Merged configuration with documented defaults."""

    omega0: float = 1.0
    gamma: float = 0.0
    j: float = 0.0
    kappa: float = 1.0
    delta: float = 10.0
    g: float = 1.0
    epsilon: float = 1.0
    phi: float = math.pi / 4
    gamma_fiber: float = 0.08
    length: float = 0.0
    theta_nodes: int = 64
    normalization: str = "conditional-renormalized"
    steps: int = 2
    j_denominator: str = "grouped"

    def __post_init__(self):
        positive = {"omega0": self.omega0, "kappa": self.kappa, "g": self.g}
        for key, value in positive.items():
            if not value > 0:
                raise ConfigError(f"config key '{key}' must be positive, got {value}")
        nonnegative = {"gamma": self.gamma, "j": self.j, "epsilon": self.epsilon,
                       "gamma_fiber": self.gamma_fiber, "length": self.length}
        for key, value in nonnegative.items():
            if value < 0:
                raise ConfigError(f"config key '{key}' must be >= 0, got {value}")
        if self.delta == 0:
            raise ConfigError("config key 'delta' must be nonzero")
        if self.theta_nodes < 16 or self.theta_nodes % 2:
            raise ConfigError(
                f"config key 'theta_nodes' must be an even integer >= 16, got {self.theta_nodes}"
            )
        if self.steps not in (2, 3):
            raise ConfigError(f"config key 'steps' must be 2 or 3, got {self.steps}")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(
                f"config key 'normalization' must be one of {NORMALIZATIONS}, "
                f"got {self.normalization!r}"
            )
        if self.j_denominator not in J_DENOMINATOR_MODES:
            raise ConfigError(
                f"config key 'j_denominator' must be one of {J_DENOMINATOR_MODES}, "
                f"got {self.j_denominator!r}"
            )


def load_config(path: str | None) -> RunConfig:
    """Parse a flat key = value file; unknown or repeated keys are errors."""
    if path is None:
        return RunConfig()
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc

    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"{path}:{lineno}: duplicate config key '{key}'")
        if key in _FLOAT_KEYS:
            try:
                seen[key] = float(value)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: key '{key}' needs a number, got {value!r}") from None
        elif key in _INT_KEYS:
            try:
                seen[key] = int(value)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: key '{key}' needs an integer, got {value!r}") from None
        elif key in _CHOICE_KEYS:
            seen[key] = value
        else:
            raise ConfigError(f"{path}:{lineno}: unknown config key '{key}'")
    return RunConfig(**seen)


@dataclass(frozen=True)
class SweepSpec:
    """Linear parameter grid 'name:min:max:count'."""

    parameter: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError(f"sweep count must be >= 2, got {self.count}")
        if not self.lo < self.hi:
            raise ConfigError(f"sweep needs min < max, got {self.lo} .. {self.hi}")

    def grid(self) -> list:
        step = (self.hi - self.lo) / (self.count - 1)
        return [self.lo + k * step for k in range(self.count)]


def parse_sweep(text: str) -> SweepSpec:
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(f"sweep must look like 'param:min:max:count', got {text!r}")
    name = parts[0]
    try:
        lo, hi = float(parts[1]), float(parts[2])
        count = int(parts[3])
    except ValueError:
        raise ConfigError(f"malformed sweep bounds in {text!r}") from None
    return SweepSpec(name, lo, hi, count)


def worker_count() -> int:
    """Worker cap from SPINWIRE_THREADS (unset or 0 means auto)."""
    raw = os.environ.get("SPINWIRE_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"SPINWIRE_THREADS must be an integer, got {raw!r}") from None
    if value < 0:
        raise ConfigError(f"SPINWIRE_THREADS must be >= 0, got {value}")
    return value if value > 0 else (os.cpu_count() or 1)


def _map_ordered(fn, items):
    """Apply fn to items, possibly in parallel, preserving order.

    Each item is computed independently and the reduction order is fixed, so
    results do not depend on the worker count.
    """
    items = list(items)
    workers = min(worker_count(), len(items)) or 1
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(value: float) -> str:
    """Fixed 12-significant-digit scientific form, locale-independent."""
    return f"{value:.11e}"


def _write_csv(path: str, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(lines) + "\n")


def _trajectory_rows(initial, trajectory):
    states = [initial, *trajectory]
    for segment, state in enumerate(states):
        for index in range(qstate.DIM):
            amp = state[index]
            yield (str(segment), str(index), qstate.basis_label(index),
                   _fmt(amp.real), _fmt(amp.imag))


def _load_program_arg(path: str) -> PulseProgram:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read program file: {exc}") from exc
    try:
        return parse_program(text)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _maybe_emit_program(args, program: PulseProgram) -> None:
    if getattr(args, "emit_program", None):
        with open(args.emit_program, "w", encoding="utf-8", newline="") as handle:
            handle.write(format_program(program))


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def _cmd_transfer(args) -> int:
    cfg = load_config(args.config)
    theta = args.theta
    if not math.isfinite(theta):
        raise ConfigError(f"theta must be finite, got {theta}")
    steps = args.steps if args.steps is not None else cfg.steps
    gamma = args.gamma if args.gamma is not None else cfg.gamma
    if gamma < 0:
        raise ConfigError(f"gamma must be >= 0, got {gamma}")

    if args.program_file:
        program = _load_program_arg(args.program_file)
    else:
        program = transfer_program(cfg.omega0, steps)
    if len(program.segments) not in (2, 3):
        raise ConfigError("transfer expects a program with 2 or 3 segments")
    if gamma > 0:
        try:
            program = with_dissipation(program, gamma)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    _maybe_emit_program(args, program)

    psi0 = math.cos(theta) * qstate.basis_state("egg") + math.sin(theta) * qstate.basis_state("geg")
    result = run_program(program, psi0)
    target = transfer_target(theta, len(program.segments))
    normalized = result.final / np.linalg.norm(result.final)
    infidelity = qstate.phase_invariant_infidelity(normalized, target / np.linalg.norm(target))

    _write_csv(args.out, "segment,state_index,basis_label,re,im",
               _trajectory_rows(psi0, result.trajectory))
    totals = program.total_time()
    print(
        f"transfer: steps={len(program.segments)} theta={_fmt(theta)} gamma={_fmt(gamma)} "
        f"infidelity={_fmt(infidelity)} success_probability={result.success_prob:.6f} "
        f"total_time[1/omega0]={_fmt(totals['inverse-omega0'])}"
    )
    return 0


def _cmd_cnot(args) -> int:
    cfg = load_config(args.config)
    if args.program_file:
        program = _load_program_arg(args.program_file)
    else:
        program = cnot_program(cfg.omega0, cfg.delta, cfg.g)
    _maybe_emit_program(args, program)

    control, target_bit = args.input[0], args.input[1]
    psi0 = qstate.basis_state(args.input + "g")
    result = run_program(program, psi0)

    flipped = {"g": "e", "e": "g"}[target_bit] if control == "e" else target_bit
    expected = qstate.basis_state(control + flipped + "g")
    overlap = complex(np.vdot(expected, result.final))
    residual_phase = math.atan2(overlap.imag, overlap.real)
    # report the (control, target) pair; the spectator stays in |g>
    output_label = qstate.basis_label(int(np.argmax(np.abs(result.final))))[:2]

    _write_csv(args.out, "segment,state_index,basis_label,re,im",
               _trajectory_rows(psi0, result.trajectory))
    totals = program.total_time()
    print(
        f"cnot: input={args.input} output={output_label} residual_phase={_fmt(residual_phase)} "
        f"total_time[1/omega0]={_fmt(totals['inverse-omega0'])} "
        f"total_time[1/chi]={_fmt(totals['inverse-chi'])}"
    )
    return 0


def _cmd_fidelity_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.sweep is None:
        raise ConfigError("fidelity-sweep requires --sweep gamma:min:max:count")
    sweep = parse_sweep(args.sweep)
    if sweep.parameter != "gamma":
        raise ConfigError(f"fidelity-sweep sweeps 'gamma', got '{sweep.parameter}'")
    if sweep.lo < 0:
        raise ConfigError(f"gamma grid must be >= 0, got minimum {sweep.lo}")

    program = transfer_program(cfg.omega0, cfg.steps)
    _maybe_emit_program(args, program)

    def evaluate(gamma: float):
        task = FidelityTask(
            gamma_spont=gamma,
            program=program,
            target_builder=lambda theta: transfer_target(theta, cfg.steps),
            theta_nodes=cfg.theta_nodes,
            normalization=cfg.normalization,
        )
        return averaged_metrics(task)

    results = _map_ordered(evaluate, sweep.grid())
    rows = [
        (_fmt(gamma), _fmt(res.value), _fmt(res.success_probability), str(res.theta_nodes))
        for gamma, res in zip(sweep.grid(), results)
    ]
    _write_csv(args.out, "gamma,avg_fidelity,avg_success_prob,theta_nodes", rows)
    return 0


def _cmd_coupling(args) -> int:
    cfg = load_config(args.config)
    if args.sweep is not None:
        sweep = parse_sweep(args.sweep)
        if sweep.parameter != "length":
            raise ConfigError(f"coupling sweeps 'length', got '{sweep.parameter}'")
        if sweep.lo < 0:
            raise ConfigError(f"length grid must be >= 0, got minimum {sweep.lo}")
        grid = sweep.grid()
    else:
        grid = [cfg.length]

    def j_at(length: float):
        params = PhysicalParams(
            kappa=cfg.kappa, delta=cfg.delta, g_ac=cfg.g, epsilon=cfg.epsilon,
            phi=cfg.phi, gamma_fiber=cfg.gamma_fiber, length=length,
        )
        try:
            return coupling_strength(params, cfg.j_denominator), ""
        except NumericalGuardError as exc:
            return None, str(exc).replace(",", ";")

    j_lossless, _ = j_at(0.0)
    values = _map_ordered(j_at, grid)
    rows = []
    for length, (j_value, error) in zip(grid, values):
        ratio = ""
        if j_value is not None and j_lossless:
            ratio = _fmt(abs(j_value) / abs(j_lossless))
        rows.append((
            _fmt(length),
            _fmt(cfg.gamma_fiber * length),
            _fmt(j_value) if j_value is not None else "",
            ratio,
            error,
        ))
    _write_csv(args.out, "length,gammaL,j_value,j_ratio_vs_lossless,error", rows)
    return 0


def _cmd_rwa_check(args) -> int:
    cfg = load_config(args.config)
    if args.sweep is not None:
        sweep = parse_sweep(args.sweep)
        if sweep.parameter != "ratio":
            raise ConfigError(f"rwa-check sweeps 'ratio', got '{sweep.parameter}'")
        if sweep.lo <= 0:
            raise ConfigError(f"ratio grid must be positive, got minimum {sweep.lo}")
        ratios = sweep.grid()
    else:
        ratios = list(DEFAULT_RWA_RATIOS)

    program = transfer_program(cfg.omega0, 2)
    _maybe_emit_program(args, program)
    psi0 = qstate.basis_state("geg")  # theta = pi/2 member of the input family

    deviations = _map_ordered(lambda r: rwa_deviation(r, program, psi0), ratios)
    rows = [(_fmt(r), _fmt(d)) for r, d in zip(ratios, deviations)]
    _write_csv(args.out, "ratio,deviation", rows)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with status 2
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinwire", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, sweepable=False, programmable=False, loadable=False):
        p.add_argument("--config", help="path to a key = value config file")
        p.add_argument("--out", required=True, help="output CSV path")
        if sweepable:
            p.add_argument("--sweep", help="linear grid 'param:min:max:count'")
        if programmable:
            p.add_argument("--emit-program", help="write the generated pulse program here")
        if loadable:
            p.add_argument("--program-file", help="run this pulse program instead of generating one")

    p = sub.add_parser("transfer", help="run the entanglement-transfer program")
    common(p, programmable=True, loadable=True)
    p.add_argument("--theta", type=float, default=math.pi / 4,
                   help="input-state angle in radians (default pi/4)")
    p.add_argument("--steps", type=int, choices=(2, 3), help="override config 'steps'")
    p.add_argument("--gamma", type=float, help="override config 'gamma'")
    p.set_defaults(handler=_cmd_transfer)

    p = sub.add_parser("cnot", help="run the controlled-NOT program on one basis input")
    common(p, programmable=True, loadable=True)
    p.add_argument("--input", required=True, choices=("gg", "ge", "eg", "ee"),
                   help="control and target atom states")
    p.set_defaults(handler=_cmd_cnot)

    p = sub.add_parser("fidelity-sweep", help="average transfer fidelity over a gamma grid")
    common(p, sweepable=True, programmable=True)
    p.set_defaults(handler=_cmd_fidelity_sweep)

    p = sub.add_parser("coupling", help="fiber-mediated coupling strength vs fiber length")
    common(p, sweepable=True)
    p.set_defaults(handler=_cmd_coupling)

    p = sub.add_parser("rwa-check", help="rotating-wave reduction error vs drive/coupling ratio")
    common(p, sweepable=True, programmable=True)
    p.set_defaults(handler=_cmd_rwa_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
