"""Command-line front end: config files, subcommands, CSV/JSON output.

Config files are UTF-8 text, one ``key = value`` per line, ``#`` comments.
Scalar keys (cyclic MHz): delta_minus_mhz, delta_plus_half_mhz, v12_mhz,
delta_eps_mhz, ell1_mhz, ell2_mhz, gamma1_mhz, gamma2_mhz, gamma12_mhz.
Instead of v12_mhz/gamma12_mhz a geometry block (r12_nm, n_index,
lambda0_nm and the comma-separated unit 3-vectors d1, d2, r12_axis) may be
given; the near-field formulas then fill both couplings.  Sweep keys
(sweep_var, sweep_start, sweep_stop, sweep_points) come as a group.
Unknown keys are a hard error.

Output files are written atomically (temp file + rename).  CSV uses comma
separators, '.' decimals, 17 significant digits, LF line endings and
``#``-prefixed header lines; every ``# cfg:`` header line re-parses into the
exact effective config that produced the file (see
:func:`parse_provenance`).  Exit codes: 0 success, 1 validation error,
2 numerical failure.  ``--threads`` (or the DIMERGATE_THREADS environment
variable) caps sweep workers, 0 = auto.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .model import (
    DipoleGeometry,
    ParameterError,
    SystemParams,
    build_hamiltonian,
    near_field_coupling,
)
from .dynamics import DynamicsError, evolve, population
from .gates import (
    ScheduleError,
    bell_schedule,
    bell_target,
    cnot_schedule,
    ideal_xy_gate,
    run_schedule,
    state_fidelity,
    xy_gate_time,
)
from .sweeps import PeakError, SweepSpec, SWEEP_VARIABLES, eigen_sweep, spectrum_sweep

__all__ = [
    "ConfigError",
    "Config",
    "SweepSettings",
    "parse_config",
    "parse_config_text",
    "parse_provenance",
    "main",
]

_PARAM_KEYS = ("delta_minus_mhz", "delta_plus_half_mhz", "v12_mhz",
               "delta_eps_mhz", "ell1_mhz", "ell2_mhz",
               "gamma1_mhz", "gamma2_mhz", "gamma12_mhz")
_GEOMETRY_SCALAR_KEYS = ("r12_nm", "n_index", "lambda0_nm")
_GEOMETRY_VECTOR_KEYS = ("d1", "d2", "r12_axis")
_SWEEP_KEYS = ("sweep_var", "sweep_start", "sweep_stop", "sweep_points")
_ALL_KEYS = frozenset(_PARAM_KEYS + _GEOMETRY_SCALAR_KEYS
                      + _GEOMETRY_VECTOR_KEYS + _SWEEP_KEYS)
_REQUIRED_KEYS = ("delta_minus_mhz", "delta_plus_half_mhz", "delta_eps_mhz",
                  "ell1_mhz", "ell2_mhz", "gamma1_mhz", "gamma2_mhz")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSettings:
    variable: str
    start: float
    stop: float
    points: int


@dataclass(frozen=True)
class Config:
    """Validated run configuration: physical parameters plus optional extras."""

    params: SystemParams
    sweep: SweepSettings | None = None
    geometry: DipoleGeometry | None = None

    def lines(self) -> list[str]:
        """Normalized ``key = value`` lines that re-parse into this config."""
        p = self.params
        out = [
            f"delta_minus_mhz = {p.delta_minus!r}",
            f"delta_plus_half_mhz = {p.delta_plus / 2.0!r}",
            f"v12_mhz = {p.v12!r}",
            f"delta_eps_mhz = {p.delta_eps!r}",
            f"ell1_mhz = {p.ell1!r}",
            f"ell2_mhz = {p.ell2!r}",
            f"gamma1_mhz = {p.gamma1!r}",
            f"gamma2_mhz = {p.gamma2!r}",
            f"gamma12_mhz = {p.gamma12!r}",
        ]
        if self.geometry is not None:
            g = self.geometry
            out += [
                f"r12_nm = {g.r12_nm!r}",
                f"n_index = {g.n_index!r}",
                f"lambda0_nm = {g.lambda0_nm!r}",
                "d1 = " + ",".join(repr(x) for x in g.d1_hat),
                "d2 = " + ",".join(repr(x) for x in g.d2_hat),
                "r12_axis = " + ",".join(repr(x) for x in g.r12_hat),
            ]
        if self.sweep is not None:
            s = self.sweep
            out += [
                f"sweep_var = {s.variable}",
                f"sweep_start = {s.start!r}",
                f"sweep_stop = {s.stop!r}",
                f"sweep_points = {s.points}",
            ]
        return out


def _parse_float(key: str, raw: str, lineno: int, source: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{source}:{lineno}: {key}: cannot parse number {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{source}:{lineno}: {key}: value must be finite, got {raw!r}")
    return value


def _parse_vector(key: str, raw: str, lineno: int, source: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"{source}:{lineno}: {key}: expected 3 comma-separated "
                          f"components, got {raw!r}")
    return tuple(_parse_float(key, p, lineno, source) for p in parts)


def parse_config_text(text: str, source: str = "<config>") -> Config:
    """Parse config file content; see the module docstring for the format."""
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = (value, lineno)

    missing = [k for k in _REQUIRED_KEYS if k not in raw]
    geometry_keys = _GEOMETRY_SCALAR_KEYS + _GEOMETRY_VECTOR_KEYS
    has_geometry = any(k in raw for k in geometry_keys)
    if "v12_mhz" not in raw and not has_geometry:
        missing += ["v12_mhz", "gamma12_mhz"]
    if missing:
        raise ConfigError(
            f"{source}: missing required keys: {', '.join(missing)} "
            f"(or a geometry block {geometry_keys} in place of v12/gamma12)")

    def fval(key: str) -> float:
        value, lineno = raw[key]
        return _parse_float(key, value, lineno, source)

    geometry = None
    if has_geometry:
        absent = [k for k in geometry_keys if k not in raw]
        if absent:
            raise ConfigError(f"{source}: incomplete geometry block, missing: {absent}")
        vectors = {}
        for key in _GEOMETRY_VECTOR_KEYS:
            value, lineno = raw[key]
            vectors[key] = _parse_vector(key, value, lineno, source)
        try:
            geometry = DipoleGeometry(
                d1_hat=vectors["d1"], d2_hat=vectors["d2"],
                r12_hat=vectors["r12_axis"],
                r12_nm=fval("r12_nm"), n_index=fval("n_index"),
                lambda0_nm=fval("lambda0_nm"),
                gamma1=fval("gamma1_mhz"), gamma2=fval("gamma2_mhz"))
        except ParameterError as exc:
            raise ConfigError(f"{source}: {exc}") from exc

    if "v12_mhz" in raw:
        v12 = fval("v12_mhz")
        if "gamma12_mhz" not in raw:
            raise ConfigError(f"{source}: v12_mhz given without gamma12_mhz")
        gamma12 = fval("gamma12_mhz")
    else:
        coupling = near_field_coupling(geometry)
        v12, gamma12 = coupling.v12, coupling.gamma12

    try:
        params = SystemParams(
            delta_minus=fval("delta_minus_mhz"),
            delta_plus=2.0 * fval("delta_plus_half_mhz"),
            v12=v12,
            delta_eps=fval("delta_eps_mhz"),
            ell1=fval("ell1_mhz"),
            ell2=fval("ell2_mhz"),
            gamma1=fval("gamma1_mhz"),
            gamma2=fval("gamma2_mhz"),
            gamma12=gamma12,
        )
    except ParameterError as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    sweep = None
    present_sweep = [k for k in _SWEEP_KEYS if k in raw]
    if present_sweep:
        if len(present_sweep) != len(_SWEEP_KEYS):
            raise ConfigError(f"{source}: incomplete sweep block, have {present_sweep}, "
                              f"need all of {_SWEEP_KEYS}")
        var, lineno = raw["sweep_var"]
        if var not in SWEEP_VARIABLES:
            raise ConfigError(f"{source}:{lineno}: sweep_var must be one of "
                              f"{SWEEP_VARIABLES}, got {var!r}")
        points_raw, lineno = raw["sweep_points"]
        try:
            points = int(points_raw)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: sweep_points: cannot parse "
                              f"integer {points_raw!r}") from None
        sweep = SweepSettings(variable=var, start=fval("sweep_start"),
                              stop=fval("sweep_stop"), points=points)

    return Config(params=params, sweep=sweep, geometry=geometry)


def parse_config(path: str) -> Config:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=path)


def parse_provenance(path: str) -> Config:
    """Recover the effective config from a CSV written by this tool."""
    lines = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# cfg: "):
                lines.append(line[len("# cfg: "):].rstrip("\n"))
            elif not line.startswith("#"):
                break
    if not lines:
        raise ConfigError(f"{path}: no '# cfg:' provenance lines found")
    return parse_config_text("\n".join(lines), source=f"{path} (provenance)")


# ---------------------------------------------------------------------------
# output writers

def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _atomic_write(path: str, content: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".dimergate-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_output(path: str, fmt: str, columns, rows, config: Config,
                  command: str, extra: dict[str, str] | None = None) -> None:
    extra = extra or {}
    rows = np.asarray(rows, dtype=float)
    if fmt == "csv":
        lines = [f"# dimergate {__version__}", f"# command: {command}"]
        lines += [f"# {key} = {value}" for key, value in extra.items()]
        lines += [f"# cfg: {line}" for line in config.lines()]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row))
        _atomic_write(path, "\n".join(lines) + "\n")
    elif fmt == "json":
        doc = {
            "version": __version__,
            "command": command,
            "extra": extra,
            "config": config.lines(),
            "columns": list(columns),
            "rows": rows.tolist(),
        }
        _atomic_write(path, json.dumps(doc, indent=1) + "\n")
    else:
        raise ConfigError(f"unknown output format {fmt!r}")


# ---------------------------------------------------------------------------
# subcommands

def _basis_state(label: str) -> np.ndarray:
    if label not in ("00", "01", "10", "11"):
        raise ConfigError(f"basis label must be one of 00/01/10/11, got {label!r}")
    rho = np.zeros((4, 4), dtype=complex)
    rho[int(label, 2), int(label, 2)] = 1.0
    return rho


def _progress(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _resolve_threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("DIMERGATE_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"DIMERGATE_THREADS must be an integer, got {env!r}") from None
    return 1


def _sweep_spec(config: Config) -> SweepSpec:
    if config.sweep is None:
        raise ConfigError("this command needs sweep keys "
                          "(sweep_var, sweep_start, sweep_stop, sweep_points)")
    s = config.sweep
    return SweepSpec(variable=s.variable, start=s.start, stop=s.stop,
                     points=s.points, base=config.params)


def _cmd_eigen(args, command: str) -> None:
    config = parse_config(args.config)
    spec = _sweep_spec(config)
    _progress(args, f"eigen sweep over {spec.variable}: {spec.points} points")
    table = eigen_sweep(spec, max_workers=_resolve_threads(args))
    _write_output(args.out, args.format, table.columns, table.rows, config, command)


def _cmd_spectrum(args, command: str) -> None:
    config = parse_config(args.config)
    if args.delta_eps is not None:
        config = replace(config, params=replace(config.params, delta_eps=args.delta_eps))
    spec = _sweep_spec(config)
    _progress(args, f"spectrum sweep over {spec.variable}: {spec.points} points")
    table = spectrum_sweep(spec, max_workers=_resolve_threads(args))
    _write_output(args.out, args.format, table.columns, table.rows, config, command)


def _cmd_sweep(args, command: str) -> None:
    if args.kind == "eigen":
        _cmd_eigen(args, command)
    else:
        args.delta_eps = None
        _cmd_spectrum(args, command)


def _trajectory_rows(traj, params, target=None):
    columns = ["t_ns", "p00", "p01", "p10", "p11"]
    rows = [traj.times_ns] + [traj.populations(i) for i in range(4)]
    if target is not None:
        columns.append("fidelity")
        rows.append(np.array([state_fidelity(rho, target) for rho in traj.states]))
    return columns, np.column_stack(rows)


def _cmd_evolve(args, command: str) -> None:
    config = parse_config(args.config)
    rho0 = _basis_state(args.rho0)
    _progress(args, f"evolve {args.t_final} ns from |{args.rho0}>")
    traj = evolve(rho0, config.params, args.t_final, output_stride=args.stride)
    columns, rows = _trajectory_rows(traj, config.params)
    _write_output(args.out, args.format, columns, rows, config, command)


def _cmd_gate(args, command: str) -> None:
    if args.kind != "cnot":
        raise ConfigError(f"unknown gate kind {args.kind!r}; available: cnot")
    config = parse_config(args.config)
    params = config.params
    amp = params.ell1
    schedule = cnot_schedule(params, control=args.control, amp=amp)
    flipped = list(args.input)
    target_bit = 1 if args.control == 1 else 0
    if args.input[args.control - 1] == "1":
        flipped[target_bit] = "0" if flipped[target_bit] == "1" else "1"
    target_label = "".join(flipped)
    target = np.zeros(4, dtype=complex)
    target[int(target_label, 2)] = 1.0
    _progress(args, f"cnot pulse: control {args.control}, |{args.input}> -> |{target_label}>, "
                    f"{schedule.total_duration_ns:.4g} ns")
    result = run_schedule(_basis_state(args.input), schedule, params,
                          target=target, target_label=target_label,
                          output_stride=args.stride)
    columns, rows = _trajectory_rows(result.trajectory, params, target)
    extra = {"pulse_end_ns": _fmt(schedule.total_duration_ns),
             "final_fidelity": _fmt(result.fidelity),
             "target": target_label}
    _write_output(args.out, args.format, columns, rows, config, command, extra)


def _cmd_bell(args, command: str) -> None:
    config = parse_config(args.config)
    params = config.params
    schedule = bell_schedule(params, amp=params.ell1)
    target = bell_target()
    _progress(args, f"bell preparation: {len(schedule)} pulses, "
                    f"{schedule.total_duration_ns:.4g} ns")
    result = run_schedule(_basis_state("00"), schedule, params, target=target,
                          target_label="(|00>+|11>)/sqrt2",
                          output_stride=args.stride)
    columns, rows = _trajectory_rows(result.trajectory, params, target)
    extra = {"pulse_end_ns": _fmt(schedule.total_duration_ns),
             "final_fidelity": _fmt(result.fidelity),
             "target": "(|00>+|11>)/sqrt2"}
    _write_output(args.out, args.format, columns, rows, config, command, extra)


def _cmd_xy(args, command: str) -> None:
    config = parse_config(args.config)
    v12 = config.params.v12
    t = args.time if args.time is not None else xy_gate_time(v12)
    gate = ideal_xy_gate(v12, t)
    doc = {
        "version": __version__,
        "command": command,
        "config": config.lines(),
        "v12_mhz": v12,
        "t_xy_ns": xy_gate_time(v12),
        "t_ns": t,
        "unitary_re": gate.real.tolist(),
        "unitary_im": gate.imag.tolist(),
    }
    _atomic_write(args.out, json.dumps(doc, indent=1) + "\n")


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are validation errors (exit 1)
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="dimergate",
                     description="coupled-molecule two-qubit gate simulator")
    parser.add_argument("--version", action="version",
                        version=f"dimergate {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p, default_out):
        p.add_argument("--config", required=True, help="config file path")
        p.add_argument("--out", default=default_out, help="output file path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
        p.add_argument("--threads", type=int, default=None,
                       help="sweep worker cap, 0 = auto (env: DIMERGATE_THREADS)")

    p = sub.add_parser("eigen", help="eigenstate sweep (energies + coefficients)")
    common(p, "eigen.csv")
    p.set_defaults(func=_cmd_eigen)

    p = sub.add_parser("spectrum", help="steady-state fluorescence spectrum sweep")
    common(p, "spectrum.csv")
    p.add_argument("--delta-eps", type=float, default=None, dest="delta_eps",
                   help="override delta_eps_mhz from the config")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("sweep", help="generic sweep dispatch")
    common(p, "sweep.csv")
    p.add_argument("--kind", choices=("eigen", "spectrum"), required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("evolve", help="time evolution under the reference drive")
    common(p, "trajectory.csv")
    p.add_argument("--t-final", type=float, required=True, dest="t_final",
                   help="evolution time in ns")
    p.add_argument("--stride", type=float, default=None, help="output stride in ns")
    p.add_argument("--rho0", default="00", help="initial basis state label")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("gate", help="conditional pi-pulse gate run")
    p.add_argument("kind", choices=("cnot",))
    common(p, "gate.csv")
    p.add_argument("--control", type=int, choices=(1, 2), default=1)
    p.add_argument("--input", default="10", help="initial basis state label")
    p.add_argument("--stride", type=float, default=None, help="output stride in ns")
    p.set_defaults(func=_cmd_gate)

    p = sub.add_parser("bell", help="two-pulse Bell-state preparation run")
    common(p, "bell.csv")
    p.add_argument("--stride", type=float, default=None, help="output stride in ns")
    p.set_defaults(func=_cmd_bell)

    p = sub.add_parser("xy", help="closed-form exchange entangling gate (JSON)")
    common(p, "xy.json")
    p.add_argument("--time", type=float, default=None,
                   help="evolution time in ns (default: t_xy)")
    p.set_defaults(func=_cmd_xy)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    command = "dimergate " + " ".join(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args, command)
    except (ConfigError, ParameterError, ScheduleError) as exc:
        print(f"dimergate: error: {exc}", file=sys.stderr)
        return 1
    except (DynamicsError, PeakError, np.linalg.LinAlgError) as exc:
        print(f"dimergate: numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
