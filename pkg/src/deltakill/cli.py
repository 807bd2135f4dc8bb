"""Experiment driver: flag/config parsing, pipeline orchestration, CSV output.

One experiment per invocation; everything is deterministic, so two runs of
the same configuration produce byte-identical CSV bodies. Each CSV starts
with a single '#' metadata line carrying the full parameter set and the
package version; numbers are written with 17 significant digits. Exit
codes: 0 success, 2 configuration error, 3 numerical-guard failure.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__, closedform, survival as surv_mod, volterra
from .errors import (BoundaryLeakageError, DegenerateFitError, DomainError,
                     GridTooCoarseError, InsufficientPointsError,
                     InvalidParameterError, NonConvergenceError,
                     NonphysicalNegativityError, NormalizationError,
                     NoVanishingError, OutOfRegimeError, SingularStepError,
                     StepResolutionError, UnknownPresetError)
from .model import (DIFFUSION_DENSITY, DiffusionParams, QuantumParams,
                    make_time_grid)
from .oracle import SpatialGrid, evolve_diffusion, evolve_schrodinger
from .propagators import (forcing_delta, forcing_gaussian,
                          kernel_diffusion, kernel_quantum)
from .volterra import VolterraProblem, delta_splice_history, solve_abel_volterra

MODES = ("diffusion-boundary", "quantum-boundary", "survival-diffusion",
         "survival-quantum", "oracle-diffusion", "oracle-quantum",
         "scattering", "asymptotics")

_CONFIG_ERRORS = (InvalidParameterError, DomainError, OutOfRegimeError,
                  UnknownPresetError, NormalizationError)
_GUARD_ERRORS = (BoundaryLeakageError, NonConvergenceError, SingularStepError,
                 GridTooCoarseError, NonphysicalNegativityError,
                 StepResolutionError, DegenerateFitError, InsufficientPointsError)


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    out: str
    kappa: float = 1.0
    dee: float = 1.0
    hbar: float = 1.0
    mass: float = 1.0
    k: float = 1.0
    x0: float = 1.0
    a: float = 0.0
    t_start: float = 0.0
    t_max: float = 10.0
    steps: int = 10_000
    normalize: bool = True
    grid_half_width: float = 40.0
    grid_nodes: int = 8001
    leak_tol: float = 1e-8
    trajectory_out: str = ""
    tail_window: tuple[float, float] | None = None

    def diffusion_params(self) -> DiffusionParams:
        return DiffusionParams(D=self.dee, kappa=self.kappa, x0=self.x0)

    def quantum_params(self, a: float | None = None) -> QuantumParams:
        return QuantumParams(hbar=self.hbar, mass=self.mass, k=self.k,
                             x0=self.x0, a=self.a if a is None else a)


PRESETS = {
    # full-range diffusion survival run: integral to tau = 1e4 plus tail fit
    "paper-diffusion": ExperimentConfig(
        mode="survival-diffusion", out="paper_diffusion.csv",
        kappa=1.0, dee=1.0, x0=1.0, t_start=1e-4, t_max=1e4, steps=1_000_000),
    # quantum survival for the unit-parameter Gaussian packet
    "paper-quantum": ExperimentConfig(
        mode="survival-quantum", out="paper_quantum.csv",
        hbar=1.0, mass=1.0, k=1.0, x0=1.0, a=0.5, t_start=0.0, t_max=1e4,
        steps=100_000, normalize=True, tail_window=(1e2, 1e4)),
    # two-term large-t expression against the exact closed form
    "paper-asymptotics": ExperimentConfig(
        mode="asymptotics", out="paper_asymptotics.csv",
        hbar=1.0, mass=1.0, k=1.0, x0=1.0, a=0.5, t_start=100.0, t_max=2000.0,
        steps=1901),
    # Crank-Nicolson cross-check of the quantum integral pipeline
    "oracle-cross-check": ExperimentConfig(
        mode="oracle-quantum", out="oracle_cross_check.csv",
        hbar=1.0, mass=1.0, k=1.0, x0=1.0, a=0.5, t_start=0.0, t_max=10.0,
        steps=10_001, grid_half_width=100.0, grid_nodes=10_001, leak_tol=1e-3),
}


def preset(name: str) -> ExperimentConfig:
    """Exact configurations used by the acceptance suite."""
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPresetError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _metadata_line(config: ExperimentConfig) -> str:
    pairs = [f"deltakill={__version__}", f"mode={config.mode}"]
    for name in ("kappa", "dee", "hbar", "mass", "k", "x0", "a", "t_start",
                 "t_max", "steps", "normalize", "grid_half_width",
                 "grid_nodes", "leak_tol"):
        pairs.append(f"{name}={_fmt(getattr(config, name))}")
    return "# " + " ".join(pairs)


def _write_csv(path: str, config: ExperimentConfig, header: list[str],
               columns: list[np.ndarray], trailer: list[str] | None = None) -> None:
    lines = [_metadata_line(config), ",".join(header)]
    rows = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    for extra in trailer or []:
        lines.append("# " + extra)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_trajectory(path: str, config: ExperimentConfig, trajectory) -> None:
    lines = [_metadata_line(config), "t,x,re_field,im_field"]
    for snap in trajectory:
        x = snap.grid.positions
        for xi, fi in zip(x, snap.field):
            lines.append(",".join(_fmt(v) for v in (snap.time, xi, fi.real, fi.imag)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# mode runners
# ---------------------------------------------------------------------------

def _run_diffusion_boundary(config: ExperimentConfig) -> None:
    d = config.diffusion_params()
    t_start = config.t_start if config.t_start > 0 else 0.01
    grid = make_time_grid(t_start, (config.t_max - t_start) / (config.steps - 1),
                          config.steps)
    # forcing of the tau-equation: the free heat kernel at the origin
    problem = VolterraProblem(
        forcing=lambda t: np.exp(-d.x0 ** 2 / (4 * t)) / (2 * np.sqrt(np.pi * t)) + 0j,
        kernel=kernel_diffusion(d), grid=grid, kind=DIFFUSION_DENSITY)
    series = solve_abel_volterra(problem)
    p_closed = closedform.boundary_density_diffusion(grid.times, d)
    p_volt = series.values.real
    rel = np.abs(p_volt - p_closed) / np.abs(p_closed)
    _write_csv(config.out, config, ["tau", "p_closed", "p_volterra", "rel_err"],
               [grid.times, p_closed, p_volt, rel])


def _run_quantum_boundary(config: ExperimentConfig) -> None:
    if config.a > 0:
        q = config.quantum_params()
        grid = make_time_grid(0.0, config.t_max / (config.steps - 1), config.steps)
        problem = VolterraProblem(forcing=lambda t: forcing_gaussian(t, q),
                                  kernel=kernel_quantum(q), grid=grid)
        series = solve_abel_volterra(problem)
        phi_closed = closedform.gaussian_amplitude_series(grid.times, q)
    else:
        q = config.quantum_params()
        t_start = config.t_start if config.t_start > 0 else 0.1
        grid = make_time_grid(t_start, (config.t_max - t_start) / (config.steps - 1),
                              config.steps)
        problem = VolterraProblem(
            forcing=lambda t: np.asarray(
                [forcing_delta(ti, q) for ti in np.atleast_1d(t)]),
            kernel=kernel_quantum(q), grid=grid,
            history=delta_splice_history(q, t_start))
        series = solve_abel_volterra(problem)
        phi_closed = closedform.boundary_amplitude_quantum(grid.times, q)
    rel = np.abs(series.values - phi_closed) / np.abs(phi_closed)
    _write_csv(config.out, config,
               ["t", "re_phi_closed", "im_phi_closed", "re_phi_volterra",
                "im_phi_volterra", "rel_err"],
               [grid.times, phi_closed.real, phi_closed.imag,
                series.values.real, series.values.imag, rel])


def _run_survival_diffusion(config: ExperimentConfig) -> None:
    d = config.diffusion_params()
    t_start = config.t_start if config.t_start > 0 else 1e-4
    grid = make_time_grid(t_start, (config.t_max - t_start) / (config.steps - 1),
                          config.steps)
    p_vals = closedform.boundary_density_diffusion(grid.times, d)
    from .model import AmplitudeSeries
    series = AmplitudeSeries(grid=grid, values=p_vals.astype(complex),
                             kind=DIFFUSION_DENSITY)
    curve = surv_mod.survival_diffusion(series, d)
    window = config.tail_window or (grid.t_end / 100.0, grid.t_end)
    tail = surv_mod.fit_tail(series, window)
    _write_csv(config.out, config, ["tau", "p", "S"],
               [grid.times, p_vals, curve.values],
               trailer=[f"tail_c={_fmt(tail.coefficient)}",
                        f"tail_exponent={_fmt(tail.exponent)}"])


def _run_survival_quantum(config: ExperimentConfig) -> None:
    q = config.quantum_params()
    if q.a <= 0:
        raise InvalidParameterError("survival-quantum needs a > 0")
    grid = make_time_grid(0.0, config.t_max / (config.steps - 1), config.steps)
    from .model import AmplitudeSeries
    phi = closedform.gaussian_amplitude_series(grid.times, q)
    series = AmplitudeSeries(grid=grid, values=phi)
    curve = surv_mod.survival_quantum(series, q, normalize=config.normalize)
    scale = surv_mod.gaussian_norm_factor(q) if config.normalize else 1.0
    phi_out = scale * phi
    window = config.tail_window or (grid.t_end / 100.0, grid.t_end)
    scaled = AmplitudeSeries(grid=grid, values=phi_out)
    tail = surv_mod.fit_tail(scaled, window)
    trailer = [f"tail_c={_fmt(tail.coefficient)}",
               f"tail_exponent={_fmt(tail.exponent)}"]
    try:
        est = surv_mod.vanishing_time_estimate(curve, tail)
        trailer += [f"T_star={_fmt(est.time)}",
                    f"T_star_extrapolated={1 if est.extrapolated else 0}"]
    except NoVanishingError as exc:
        trailer += ["T_star=nan", "T_star_extrapolated=0",
                    f"no_vanishing_reason={exc}"]
    _write_csv(config.out, config, ["t", "re_phi", "im_phi", "abs2_phi", "S"],
               [grid.times, phi_out.real, phi_out.imag,
                np.abs(phi_out) ** 2, curve.values], trailer=trailer)


def _oracle_common(config: ExperimentConfig, result, integral_curve) -> None:
    times = result.survival.grid.times
    s_grid = result.survival.values
    s_int = integral_curve
    rel = np.abs(s_grid - s_int) / np.maximum(np.abs(s_int), 1e-300)
    _write_csv(config.out, config, ["t", "S_grid", "S_integral", "rel_err"],
               [times, s_grid, s_int, rel])
    if config.trajectory_out:
        _write_trajectory(config.trajectory_out, config, result.trajectory)


def _run_oracle_diffusion(config: ExperimentConfig) -> None:
    d = config.diffusion_params()
    sg = SpatialGrid(half_width=config.grid_half_width, node_count=config.grid_nodes)
    tg = make_time_grid(0.0, config.t_max / (config.steps - 1), config.steps)
    result = evolve_diffusion(d, sg, tg, initial_width=0.02,
                              leak_tol=config.leak_tol)
    # integral pipeline on the same times (tau = D t)
    taus = np.maximum(tg.times * d.D, 1e-300)
    p = closedform.boundary_density_diffusion(taus[1:], d)
    inc = 0.5 * np.diff(taus[1:]) * (p[:-1] + p[1:])
    cum = np.concatenate([[0.0, 0.0], np.cumsum(inc)])
    s_int = 1.0 - (d.kappa / d.D) * cum
    _oracle_common(config, result, s_int)


def _run_oracle_quantum(config: ExperimentConfig) -> None:
    q = config.quantum_params()
    sg = SpatialGrid(half_width=config.grid_half_width, node_count=config.grid_nodes)
    tg = make_time_grid(0.0, config.t_max / (config.steps - 1), config.steps)
    result = evolve_schrodinger(q, sg, tg, leak_tol=config.leak_tol)
    problem = VolterraProblem(forcing=lambda t: forcing_gaussian(t, q),
                              kernel=kernel_quantum(q), grid=tg)
    from .model import AmplitudeSeries
    series = solve_abel_volterra(problem)
    curve = surv_mod.survival_quantum(series, q, normalize=True)
    _oracle_common(config, result, curve.values)


def _run_scattering(config: ExperimentConfig) -> None:
    q = config.quantum_params(a=0.0)
    us = np.logspace(-2, 2, config.steps if config.steps < 10_000 else 201)
    # sweep u by sweeping the wavenumber at fixed coupling
    rows = []
    for u in us:
        q_w = q.mass * q.k / (2 * q.hbar ** 2 * u)
        refl, trans, absorbed = closedform.stationary_scattering(q_w, q)
        rows.append((u, abs(refl) ** 2, abs(trans) ** 2, absorbed))
    arr = np.array(rows)
    _write_csv(config.out, config, ["u", "abs_r2", "abs_t2", "absorbed"],
               [arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3]])


def _run_asymptotics(config: ExperimentConfig) -> None:
    q = config.quantum_params()
    if q.a <= 0:
        raise InvalidParameterError("asymptotics mode needs a > 0")
    grid = make_time_grid(config.t_start,
                          (config.t_max - config.t_start) / (config.steps - 1),
                          config.steps)
    exact = closedform.gaussian_amplitude_series(grid.times, q)
    asym = closedform.asymptotic_phi_gaussian(grid.times, q)
    ratio = np.abs(asym) / np.abs(exact)
    _write_csv(config.out, config,
               ["t", "abs_phi_exact", "abs_phi_asym", "ratio"],
               [grid.times, np.abs(exact), np.abs(asym), ratio])


_RUNNERS = {
    "diffusion-boundary": _run_diffusion_boundary,
    "quantum-boundary": _run_quantum_boundary,
    "survival-diffusion": _run_survival_diffusion,
    "survival-quantum": _run_survival_quantum,
    "oracle-diffusion": _run_oracle_diffusion,
    "oracle-quantum": _run_oracle_quantum,
    "scattering": _run_scattering,
    "asymptotics": _run_asymptotics,
}


def run(config: ExperimentConfig) -> int:
    """Execute one experiment; returns the process exit code."""
    try:
        if config.mode not in _RUNNERS:
            raise InvalidParameterError(f"unknown mode {config.mode!r}")
        _RUNNERS[config.mode](config)
    except _CONFIG_ERRORS as exc:
        print(f"deltakill: configuration error: {exc}", file=sys.stderr)
        return 2
    except _GUARD_ERRORS as exc:
        print(f"deltakill: numerical guard: {exc}", file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------

def _read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameterError(f"bad config line {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


_FIELD_TYPES = {
    "mode": str, "out": str, "kappa": float, "dee": float, "hbar": float,
    "mass": float, "k": float, "x0": float, "a": float, "t_start": float,
    "t_max": float, "steps": int, "normalize": lambda v: v not in ("0", "false", "off"),
    "grid_half_width": float, "grid_nodes": int, "leak_tol": float,
    "trajectory_out": str,
}


def build_config(argv: list[str] | None = None) -> ExperimentConfig:
    parser = argparse.ArgumentParser(
        prog="deltakill",
        description="Boundary amplitude and survival probability for dynamics "
                    "with an absorbing delta potential")
    parser.add_argument("--mode", choices=MODES)
    parser.add_argument("--preset", help=f"one of {sorted(PRESETS)}")
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--trajectory-out", dest="trajectory_out",
                        help="optional oracle trajectory CSV path")
    for flag in ("--kappa", "--dee", "--hbar", "--mass", "--k", "--x0", "--a",
                 "--t-start", "--t-max", "--leak-tol"):
        parser.add_argument(flag, type=float, dest=flag[2:].replace("-", "_"))
    parser.add_argument("--steps", type=int)
    parser.add_argument("--grid-half-width", type=float, dest="grid_half_width")
    parser.add_argument("--grid-nodes", type=int, dest="grid_nodes")
    parser.add_argument("--normalize", choices=("on", "off"))
    args = parser.parse_args(argv)

    if args.preset:
        config = preset(args.preset)
    else:
        config = ExperimentConfig(mode="", out="out.csv")
    updates: dict = {}
    if args.config:
        for key, raw in _read_config_file(args.config).items():
            if key not in _FIELD_TYPES:
                raise InvalidParameterError(f"unknown config key {key!r}")
            updates[key] = _FIELD_TYPES[key](raw)
    for key in _FIELD_TYPES:
        val = getattr(args, key, None)
        if val is not None:
            updates[key] = val
    if args.normalize is not None:
        updates["normalize"] = args.normalize == "on"
    config = replace(config, **updates)
    if not config.mode:
        raise InvalidParameterError("no mode given (use --mode or --preset)")
    return config


def main(argv: list[str] | None = None) -> int:
    try:
        config = build_config(argv)
    except _CONFIG_ERRORS as exc:
        print(f"deltakill: configuration error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
