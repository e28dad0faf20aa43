"""Command-line front end.

Every subcommand writes one machine-readable data file (CSV by default)
plus a JSON sidecar holding the full configuration and any branch or
truncation metadata, so a run can be audited and repeated.  Data files
are byte-identical across runs of the same configuration.

Exit codes: 0 on success, 2 on a usage or configuration error, 3 when a
numerical routine reports failure (resonance, boundary, overflow).
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import functools
import json
import math
import sys
import time

import click
import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .decimation import eps1_closed_form, eps1_semi_infinite, gf_entry, surface_gf_finite
from .model import (
    ChainParams,
    build_dynamical_matrix,
    effective_couplings,
    hatano_nelson_params,
)
from .observables import (
    GapClosingError,
    gain as gain_of,
    glue_dos,
    hatano_noise,
    local_dos,
    phase_diagram,
    topo_indicator_from_xi,
    winding_number,
)
from .oracle import dense_gf, propagate
from .surface import correlation_data, gf_pair, glue_chains, solve_surface_gf, unwrap_imag
from .transient import TransientParams, coherent_evolution

FLOAT_FMT = "%.12e"

_PARAM_KEYS = ("epsilon", "t_c", "phi", "gamma", "pump", "gamma_nn", "pump_nn")


@dataclasses.dataclass
class RunConfig:
    """Everything one subcommand run depends on."""

    subcommand: str
    params: ChainParams
    omega_min: float = -3.0
    omega_max: float = 3.0
    omega_points: int = 601
    eta: float = 1e-6
    n_sites: int = 0
    sites: tuple = (0,)
    t_max: float = 20.0
    dt: float = 0.05
    output_path: str = ""
    format: str = "csv"
    threads: int = 1
    extra: dict = dataclasses.field(default_factory=dict)

    def validate(self) -> None:
        if self.omega_points < 2:
            raise ValueError(f"omega grid needs at least 2 points, got {self.omega_points}")
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if self.dt <= 0 or self.t_max <= 0:
            raise ValueError("dt and t_max must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if not self.output_path:
            raise ValueError("output path is empty")

    def omega_grid(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.omega_points)

    def time_grid(self) -> np.ndarray:
        n = int(round(self.t_max / self.dt)) + 1
        return np.linspace(0.0, self.dt * (n - 1), n)


def load_params(path: str | None) -> ChainParams:
    """Chain parameters from a JSON file; defaults when no file is given.

    Accepted keys: epsilon, t_c, phi, gamma, pump, gamma_nn, pump_nn, and
    an optional "units" field that must be "t_c" (all quantities are in
    units of the coherent hopping).
    """
    if path is None:
        return ChainParams()
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"config {path} must hold a JSON object")
    unknown = set(raw) - set(_PARAM_KEYS) - {"units"}
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    units = raw.get("units", "t_c")
    if units != "t_c":
        raise ValueError(f'only units "t_c" are supported, got {units!r}')
    kwargs = {k: float(raw[k]) for k in _PARAM_KEYS if k in raw}
    return ChainParams(**kwargs)


def _fmt_cell(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FMT % float(x)


def _write_table(path: str, fmt: str, header, rows) -> None:
    try:
        if fmt == "csv":
            lines = [",".join(header)]
            lines.extend(",".join(_fmt_cell(x) for x in row) for row in rows)
            with open(path, "w", newline="") as fh:
                fh.write("\n".join(lines) + "\n")
        else:
            def cell(x):
                if isinstance(x, str):
                    return x
                if isinstance(x, (int, np.integer)):
                    return int(x)
                return float(x)

            payload = {
                "columns": list(header),
                "rows": [[cell(x) for x in row] for row in rows],
            }
            with open(path, "w") as fh:
                json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
                fh.write("\n")
    except OSError as exc:
        raise ValueError(f"cannot write {path}: {exc}") from exc


def _write_sidecar(config: RunConfig, notes: dict) -> None:
    payload = {
        "command": config.subcommand,
        "version": __version__,
        "params": dataclasses.asdict(config.params),
        "eta": config.eta,
        "omega_grid": [config.omega_min, config.omega_max, config.omega_points],
        "time_grid": [0.0, config.t_max, config.dt],
        "n_sites": config.n_sites,
        "sites": list(config.sites),
        "format": config.format,
        "units": "t_c",
        "notes": notes,
    }
    path = config.output_path + ".meta.json"
    try:
        with open(path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise ValueError(f"cannot write {path}: {exc}") from exc


def _map_ordered(fn, items, threads: int):
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# ---------------------------------------------------------------- handlers


def _run_convergence(config: RunConfig):
    c = effective_couplings(config.params)
    omega = config.extra.get("omega", 0.0) + 1j * config.eta
    n_max = int(config.extra.get("n_max", 42))
    if n_max < 2:
        raise ValueError("n-max must be >= 2")
    limit = eps1_semi_infinite(c, omega)
    rows = []
    for n_sites in range(2, n_max + 1):
        e1 = eps1_closed_form(n_sites - 2, c, omega)
        rows.append((n_sites, e1.real, e1.imag, limit.real, limit.imag))
    notes = {"omega": config.extra.get("omega", 0.0), "limit": [limit.real, limit.imag]}
    return ("N", "re_eps1", "im_eps1", "re_limit", "im_limit"), rows, notes


def _run_gf(config: RunConfig):
    c = effective_couplings(config.params)
    j = int(config.extra["j"])
    l = int(config.extra["l"])
    if j < 0 or l < 0:
        raise ValueError("j and l must be >= 0")
    finite = config.n_sites > 0
    if finite and max(j, l) >= config.n_sites:
        raise ValueError("j and l must be < n-sites for a finite chain")

    def one(omega: float):
        w = omega + 1j * config.eta
        if finite:
            value = gf_entry(c, w, config.n_sites, j, l)
        else:
            surf = solve_surface_gf(c, w, eta=config.eta)
            value = gf_pair(surf, c, j, l)
        return (omega, j, l, value.real, value.imag)

    rows = _map_ordered(one, config.omega_grid(), config.threads)
    notes = {"chain": "finite" if finite else "semi-infinite"}
    return ("omega", "j", "l", "re", "im"), rows, notes


def _run_xi(config: RunConfig):
    c = effective_couplings(config.params)
    direction = config.extra.get("direction", "minus")
    if direction not in ("plus", "minus"):
        raise ValueError(f"direction must be plus or minus, got {direction!r}")

    def one(omega: float):
        surf = solve_surface_gf(c, omega + 1j * config.eta, eta=config.eta)
        corr = correlation_data(surf, c)
        return corr.xi_plus if direction == "plus" else corr.xi_minus

    omegas = config.omega_grid()
    xi_raw = np.array(_map_ordered(one, omegas, config.threads))
    xi_smooth = unwrap_imag(xi_raw)
    rows = []
    for omega, raw, smooth in zip(omegas, xi_raw, xi_smooth):
        inv = 1.0 / raw.real if raw.real != 0 else math.inf
        rows.append((omega, raw.real, smooth.imag, raw.imag, inv))
    notes = {"direction": direction, "im_xi": "sweep-continuity unwrapped; im_xi_raw is the principal value"}
    return ("omega", "re_xi", "im_xi", "im_xi_raw", "re_xi_inv"), rows, notes


def _run_dos(config: RunConfig):
    c = effective_couplings(config.params)

    def one(omega: float):
        surf = solve_surface_gf(c, omega + 1j * config.eta, eta=config.eta)
        out = []
        for j in config.sites:
            out.append((omega, int(j), local_dos(gf_pair(surf, c, int(j), int(j)))))
        return out

    chunks = _map_ordered(one, config.omega_grid(), config.threads)
    rows = [row for chunk in chunks for row in chunk]
    notes = {"chain": "semi-infinite"}
    return ("omega", "site", "dos"), rows, notes


def _run_dos_bulk(config: RunConfig):
    c = effective_couplings(config.params)

    def one(omega: float):
        return (omega, glue_dos(c, omega, eta=config.eta))

    rows = _map_ordered(one, config.omega_grid(), config.threads)
    notes = {"chain": "bulk (two glued semi-infinite halves)"}
    return ("omega", "dos"), rows, notes


def _run_winding(config: RunConfig):
    c = effective_couplings(config.params)
    params = config.params
    boundary_hits = 0

    def one(omega: float):
        nonlocal boundary_hits
        try:
            w1 = winding_number(params, omega)
        except GapClosingError:
            boundary_hits += 1
            w1 = math.nan
        try:
            surf = solve_surface_gf(c, omega + 1j * config.eta, eta=config.eta)
            ind = topo_indicator_from_xi(correlation_data(surf, c))
        except GapClosingError:
            boundary_hits += 1
            ind = math.nan
        return (omega, w1, ind)

    rows = [one(w) for w in config.omega_grid()]
    notes = {"boundary_points": boundary_hits, "boundary_marker": "nan"}
    return ("omega", "W1", "indicator"), rows, notes


def _run_phases(config: RunConfig):
    ex = config.extra
    gammas = np.linspace(ex["gamma_min"], ex["gamma_max"], int(ex["gamma_points"]))
    pumps = np.linspace(ex["pump_min"], ex["pump_max"], int(ex["pump_points"]))
    omega = ex.get("omega", 0.0)
    n_sites = config.n_sites if config.n_sites > 0 else 40
    diagram = phase_diagram(
        config.params, gammas, pumps, omega, n_sites, eta=config.eta
    )
    rows = []
    for i, g in enumerate(diagram.gamma_grid):
        for k, p in enumerate(diagram.pump_grid):
            rows.append((float(g), float(p), str(diagram.classification[i, k])))
    notes = {"omega": omega, "stability_n_sites": n_sites}
    return ("gamma", "pump", "class"), rows, notes


def _run_transient(config: RunConfig):
    seed = complex(config.extra.get("seed_amp", 1.0))
    tp = TransientParams.from_chain(config.params, seed_amplitude=seed)
    t_grid = config.time_grid()
    compare_n = int(config.extra.get("compare_oracle", 0))
    sites = [int(j) for j in config.sites]
    if any(j < 0 for j in sites):
        raise ValueError("sites must be >= 0")

    closed = {j: coherent_evolution(tp, j, t_grid) for j in sites}
    oracle = None
    if compare_n > 0:
        if max(sites) >= compare_n:
            raise ValueError("compare-oracle chain too short for requested sites")
        matrix = build_dynamical_matrix(config.params, compare_n)
        initial = np.zeros(compare_n, dtype=complex)
        initial[0] = seed
        oracle = propagate(matrix, initial, t_grid)

    header = ["t", "site", "re", "im"]
    if oracle is not None:
        header += ["re_oracle", "im_oracle"]
    rows = []
    for i, t in enumerate(t_grid):
        for j in sites:
            row = [t, j, closed[j][i].real, closed[j][i].imag]
            if oracle is not None:
                if i < oracle.amplitudes.shape[0]:
                    row += [oracle.amplitudes[i, j].real, oracle.amplitudes[i, j].imag]
                else:
                    row += [math.nan, math.nan]
            rows.append(tuple(row))
    notes = {
        "seed_amp": [seed.real, seed.imag],
        "oracle_n_sites": compare_n,
        "oracle_truncated": bool(oracle.truncated) if oracle is not None else False,
    }
    return tuple(header), rows, notes


def _run_gain(config: RunConfig):
    c = effective_couplings(config.params)
    gamma = config.params.gamma
    sites = [int(j) for j in config.sites]

    def one(omega: float):
        surf = solve_surface_gf(c, omega + 1j * config.eta, eta=config.eta)
        corr = correlation_data(surf, c)
        out = []
        for j in sites:
            g = gain_of(surf, corr, gamma, j)
            db = 10.0 * math.log10(g) if g > 0 else -math.inf
            out.append((omega, j, db))
        return out

    chunks = _map_ordered(one, config.omega_grid(), config.threads)
    rows = [row for chunk in chunks for row in chunk]
    notes = {"gain_db": "10*log10(gamma^2 |G_{j,0}|^2)"}
    return ("omega", "site", "gain_db"), rows, notes


def _run_noise(config: RunConfig):
    sites = [int(j) for j in config.sites]
    l_max_seen = 0

    def one(omega: float):
        nonlocal l_max_seen
        out = []
        for j in sites:
            report = hatano_noise(config.params, omega, j, eta=config.eta)
            l_max_seen = max(l_max_seen, report.l_max)
            out.append((omega, j, report.n_add))
        return out

    chunks = _map_ordered(one, config.omega_grid(), config.threads)
    rows = [row for chunk in chunks for row in chunk]
    notes = {
        "row_truncation": "columns kept until the decaying direction sheds 8 e-foldings",
        "max_l_max": l_max_seen,
    }
    return ("omega", "site", "n_add"), rows, notes


_HANDLERS = {
    "convergence": _run_convergence,
    "gf": _run_gf,
    "xi": _run_xi,
    "dos": _run_dos,
    "dos-bulk": _run_dos_bulk,
    "winding": _run_winding,
    "phases": _run_phases,
    "transient": _run_transient,
    "gain": _run_gain,
    "noise": _run_noise,
}


def run(config: RunConfig) -> int:
    """Validate, dispatch, and write the data file and sidecar."""
    config.validate()
    handler = _HANDLERS.get(config.subcommand)
    if handler is None:
        raise ValueError(f"unknown subcommand {config.subcommand!r}")
    header, rows, notes = handler(config)
    _write_table(config.output_path, config.format, header, rows)
    _write_sidecar(config, notes)
    return 0


def bench(n_list, repetitions: int, omega: float = 0.3, eta: float = 1e-6) -> dict:
    """Best-of-``repetitions`` wall times, surface recursion vs dense inversion.

    Both paths are checked against each other at the smallest N before any
    timing starts.  Timing runs with BLAS pinned to one thread; otherwise
    the thread pool kicks in at the larger sizes and flattens the fitted
    dense exponent.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    n_list = sorted(int(n) for n in n_list)
    if not n_list or n_list[0] < 2:
        raise ValueError("need chain sizes >= 2")
    params = ChainParams(epsilon=0.1, gamma=0.4, pump=0.1)
    c = effective_couplings(params)
    w = omega + 1j * eta

    n0 = n_list[0]
    g_fast = surface_gf_finite(c, w, n0)
    g_dense = dense_gf(build_dynamical_matrix(params, n0), w)[0, 0]
    rel = abs(g_fast - g_dense) / max(abs(g_dense), 1e-300)
    if rel > 1e-10:
        raise RuntimeError(
            f"surface recursion disagrees with dense inversion at N={n0} "
            f"(relative {rel:.2e}); refusing to time a broken path"
        )

    decim_times, dense_times = [], []
    with threadpool_limits(limits=1):
        for n in n_list:
            matrix = build_dynamical_matrix(params, n)
            # the recursion finishes in microseconds at these sizes, so each
            # sample times a batch to stay clear of scheduler jitter, and the
            # fastest sample is kept: interruptions only ever add time
            batch = max(1, 8192 // n)
            for _ in range(batch):
                surface_gf_finite(c, w, n)
            samples = []
            for _ in range(repetitions):
                t0 = time.perf_counter()
                for _ in range(batch):
                    surface_gf_finite(c, w, n)
                samples.append((time.perf_counter() - t0) / batch)
            decim_times.append(min(samples))
            dense_gf(matrix, w)
            dense_gf(matrix, w)
            samples = []
            for _ in range(repetitions):
                t0 = time.perf_counter()
                dense_gf(matrix, w)
                samples.append(time.perf_counter() - t0)
            dense_times.append(min(samples))

    log_n = np.log(np.asarray(n_list, dtype=float))
    slope_decim = float(np.polyfit(log_n, np.log(decim_times), 1)[0])
    slope_dense = float(np.polyfit(log_n, np.log(dense_times), 1)[0])
    return {
        "n_list": n_list,
        "t_decim": decim_times,
        "t_dense": dense_times,
        "exponent_decim": slope_decim,
        "exponent_dense": slope_dense,
        "agreement_rel": rel,
    }


# ---------------------------------------------------------------- click shell


def _guard(fn):
    @functools.wraps(fn)
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
        except (RuntimeError, OverflowError, FloatingPointError) as exc:
            click.echo(f"numerical error: {exc}", err=True)
            sys.exit(3)

    return inner


def _common(fn):
    fn = click.option("--threads", type=int, default=1, show_default=True,
                      help="Worker threads for frequency grids.")(fn)
    fn = click.option("--eta", type=float, default=1e-6, show_default=True,
                      help="Displacement off the real frequency axis.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                      default="csv", show_default=True)(fn)
    fn = click.option("--out", "out_path", type=click.Path(dir_okay=False),
                      default=None, help="Output data file (default: <command>.<format>).")(fn)
    fn = click.option("--config", "config_path",
                      type=click.Path(exists=True, dir_okay=False), default=None,
                      help="JSON file with chain parameters.")(fn)
    return fn


def _omega_opts(fn):
    fn = click.option("--omega-points", type=int, default=601, show_default=True)(fn)
    fn = click.option("--omega-max", type=float, default=3.0, show_default=True)(fn)
    fn = click.option("--omega-min", type=float, default=-3.0, show_default=True)(fn)
    return fn


def _mk_config(name, config_path, out_path, fmt, eta, threads, **overrides) -> RunConfig:
    params = overrides.pop("params", None)
    if params is None:
        params = load_params(config_path)
    cfg = RunConfig(
        subcommand=name,
        params=params,
        eta=eta,
        format=fmt,
        threads=threads,
        output_path=out_path or f"{name}.{fmt}",
    )
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Green's functions of driven-dissipative bosonic chains."""


@main.command()
@_common
@click.option("--omega", type=float, default=0.0, show_default=True)
@click.option("--n-max", type=int, default=42, show_default=True,
              help="Largest chain length in the convergence sweep.")
@_guard
def convergence(config_path, out_path, fmt, eta, threads, omega, n_max):
    """Frontier-energy convergence toward the semi-infinite limit."""
    cfg = _mk_config("convergence", config_path, out_path, fmt, eta, threads,
                     extra={"omega": omega, "n_max": n_max})
    sys.exit(run(cfg))


@main.command()
@_common
@_omega_opts
@click.option("--j", "j", type=int, required=True)
@click.option("--l", "l", type=int, required=True)
@click.option("--n-sites", type=int, default=0, show_default=True,
              help="Chain length; 0 means semi-infinite.")
@_guard
def gf(config_path, out_path, fmt, eta, threads, omega_min, omega_max,
       omega_points, j, l, n_sites):
    """Two-point resolvent element G_{j,l} over a frequency grid."""
    cfg = _mk_config("gf", config_path, out_path, fmt, eta, threads,
                     omega_min=omega_min, omega_max=omega_max,
                     omega_points=omega_points, n_sites=n_sites,
                     extra={"j": j, "l": l})
    sys.exit(run(cfg))


@main.command()
@_common
@_omega_opts
@click.option("--direction", type=click.Choice(["plus", "minus"]), default="minus",
              show_default=True, help="Directional exponent: rows (minus) or columns (plus).")
@_guard
def xi(config_path, out_path, fmt, eta, threads, omega_min, omega_max,
       omega_points, direction):
    """Correlation/amplification exponent over a frequency grid."""
    cfg = _mk_config("xi", config_path, out_path, fmt, eta, threads,
                     omega_min=omega_min, omega_max=omega_max,
                     omega_points=omega_points, extra={"direction": direction})
    sys.exit(run(cfg))


@main.command()
@_common
@_omega_opts
@click.option("--sites", type=int, multiple=True, default=(0,), show_default=True)
@_guard
def dos(config_path, out_path, fmt, eta, threads, omega_min, omega_max,
        omega_points, sites):
    """Local density of states at chosen sites of the semi-infinite chain."""
    cfg = _mk_config("dos", config_path, out_path, fmt, eta, threads,
                     omega_min=omega_min, omega_max=omega_max,
                     omega_points=omega_points, sites=tuple(sites))
    sys.exit(run(cfg))


@main.command("dos-bulk")
@_common
@_omega_opts
@_guard
def dos_bulk(config_path, out_path, fmt, eta, threads, omega_min, omega_max,
             omega_points):
    """Bulk density of states from two glued semi-infinite chains."""
    cfg = _mk_config("dos-bulk", config_path, out_path, fmt, eta, threads,
                     omega_min=omega_min, omega_max=omega_max,
                     omega_points=omega_points)
    sys.exit(run(cfg))


@main.command()
@_common
@_omega_opts
@_guard
def winding(config_path, out_path, fmt, eta, threads, omega_min, omega_max,
            omega_points):
    """Spectral winding number and the decay-exponent indicator."""
    cfg = _mk_config("winding", config_path, out_path, fmt, eta, threads,
                     omega_min=omega_min, omega_max=omega_max,
                     omega_points=omega_points)
    sys.exit(run(cfg))


@main.command()
@_common
@click.option("--gamma-min", type=float, default=0.1, show_default=True)
@click.option("--gamma-max", type=float, default=4.0, show_default=True)
@click.option("--gamma-points", type=int, default=40, show_default=True)
@click.option("--pump-min", type=float, default=0.1, show_default=True)
@click.option("--pump-max", type=float, default=4.0, show_default=True)
@click.option("--pump-points", type=int, default=40, show_default=True)
@click.option("--omega", type=float, default=0.0, show_default=True)
@click.option("--n-sites", type=int, default=40, show_default=True,
              help="Chain length for the stability check.")
@_guard
def phases(config_path, out_path, fmt, eta, threads, gamma_min, gamma_max,
           gamma_points, pump_min, pump_max, pump_points, omega, n_sites):
    """Topology/stability classification over the loss-pump plane."""
    if gamma_points < 1 or pump_points < 1:
        raise click.UsageError("grid needs at least one point per axis")
    cfg = _mk_config("phases", config_path, out_path, fmt, eta, threads,
                     n_sites=n_sites,
                     extra={"gamma_min": gamma_min, "gamma_max": gamma_max,
                            "gamma_points": gamma_points, "pump_min": pump_min,
                            "pump_max": pump_max, "pump_points": pump_points,
                            "omega": omega})
    sys.exit(run(cfg))


@main.command()
@_common
@click.option("--sites", type=int, multiple=True, default=(0, 1, 2, 3, 4),
              show_default=True)
@click.option("--tmax", type=float, default=20.0, show_default=True)
@click.option("--dt", type=float, default=0.05, show_default=True)
@click.option("--seed-amp", type=float, default=1.0, show_default=True,
              help="Initial coherent amplitude on site 0.")
@click.option("--compare-oracle", type=int, default=0, show_default=True,
              help="Also evolve a finite chain of this length exactly.")
@_guard
def transient(config_path, out_path, fmt, eta, threads, sites, tmax, dt,
              seed_amp, compare_oracle):
    """Site amplitudes after a coherent kick on the edge site."""
    cfg = _mk_config("transient", config_path, out_path, fmt, eta, threads,
                     sites=tuple(sites), t_max=tmax, dt=dt,
                     extra={"seed_amp": seed_amp, "compare_oracle": compare_oracle})
    sys.exit(run(cfg))


@main.command()
@_common
@_omega_opts
@click.option("--sites", type=int, multiple=True, default=(5, 10, 15, 20),
              show_default=True)
@_guard
def gain(config_path, out_path, fmt, eta, threads, omega_min, omega_max,
         omega_points, sites):
    """Power gain (dB) of sites driven through the edge."""
    cfg = _mk_config("gain", config_path, out_path, fmt, eta, threads,
                     omega_min=omega_min, omega_max=omega_max,
                     omega_points=omega_points, sites=tuple(sites))
    sys.exit(run(cfg))


@main.command()
@_common
@_omega_opts
@click.option("--sites", type=int, multiple=True, default=(5, 10, 15, 20),
              show_default=True)
@_guard
def noise(config_path, out_path, fmt, eta, threads, omega_min, omega_max,
          omega_points, sites):
    """Added noise quanta referred to the input."""
    cfg = _mk_config("noise", config_path, out_path, fmt, eta, threads,
                     omega_min=omega_min, omega_max=omega_max,
                     omega_points=omega_points, sites=tuple(sites))
    sys.exit(run(cfg))


@main.command("bench")
@click.option("--n-list", type=int, multiple=True, default=(50, 100, 200, 400),
              show_default=True)
@click.option("--reps", type=int, default=7, show_default=True)
@click.option("--omega", type=float, default=0.3, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@_guard
def bench_cmd(n_list, reps, omega, out_path):
    """Time the O(N) surface recursion against dense inversion."""
    if reps < 1:
        raise click.UsageError("reps must be >= 1")
    report = bench(n_list, reps, omega=omega)
    for n, td, tf in zip(report["n_list"], report["t_decim"], report["t_dense"]):
        click.echo(f"N={n:5d}  decimation {td:.3e} s  dense {tf:.3e} s")
    click.echo(
        f"fitted exponents: decimation {report['exponent_decim']:.2f}, "
        f"dense {report['exponent_dense']:.2f}"
    )
    if out_path:
        rows = list(zip(report["n_list"], report["t_decim"], report["t_dense"]))
        _write_table(out_path, "csv", ("N", "t_decim", "t_dense"), rows)
    sys.exit(0)


# ---------------------------------------------------------------- presets
#
# Each figN command reproduces one data set from the study this package
# accompanies, with the parameter values stated in that figure's caption
# baked in.  Values are in units of t_c throughout.


def _preset_config(name, out_path, fmt, params, **overrides) -> RunConfig:
    cfg = RunConfig(subcommand=name, params=params, format=fmt,
                    output_path=out_path or f"{name}.{fmt}")
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


def _preset_common(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                      default="csv", show_default=True)(fn)
    fn = click.option("--out", "out_path", type=click.Path(dir_okay=False),
                      default=None)(fn)
    return fn


FIG2_PARAMS = ChainParams(epsilon=-0.2, gamma=0.1, pump=0.05)
FIG5_PARAMS = hatano_nelson_params(epsilon=0.1, phi=0.45 * math.pi, gamma=3.0, pump=3.0)
FIG6_PARAMS = hatano_nelson_params(epsilon=0.0, phi=0.5 * math.pi, gamma=2.0, pump=4.0)
FIG7_PARAMS = ChainParams(epsilon=0.1, gamma=0.5)
FIG8_BASE = dict(epsilon=0.0, phi=0.5 * math.pi, pump=1.4)
FIG9_TEMPLATE = hatano_nelson_params(epsilon=0.0, phi=0.5 * math.pi, gamma=2.0, pump=1.4)
FIG10_PARAMS = hatano_nelson_params(epsilon=0.0, phi=0.5 * math.pi, gamma=4.0, pump=3.6)


@main.command()
@_preset_common
@_guard
def fig2(out_path, fmt):
    """Frontier-energy convergence for the weakly dissipative chain."""
    cfg = _preset_config("convergence", out_path, fmt, FIG2_PARAMS,
                         extra={"omega": 0.0, "n_max": 42})
    cfg.output_path = out_path or f"fig2.{fmt}"
    sys.exit(run(cfg))


@main.command()
@_preset_common
@_guard
def fig3(out_path, fmt):
    """Local DOS away from the edge of a lossless semi-infinite chain."""
    params = ChainParams()
    cfg = _preset_config("dos", out_path, fmt, params, eta=1e-3,
                         sites=(0, 1, 2, 10, 50))
    cfg.output_path = out_path or f"fig3.{fmt}"
    cfg.validate()
    c = effective_couplings(params)
    header, rows, notes = _run_dos(cfg)
    bulk_rows = [(w, -1, glue_dos(c, w, eta=cfg.eta)) for w in cfg.omega_grid()]
    rows = list(rows) + bulk_rows
    _write_table(cfg.output_path, cfg.format, header, rows)
    notes["bulk_site_marker"] = -1
    _write_sidecar(cfg, notes)
    sys.exit(0)


@main.command()
@_preset_common
@click.option("--gamma-lossy", type=float, default=0.5, show_default=True,
              help="Loss rate used for the dissipative curves.")
@_guard
def fig4(out_path, fmt, gamma_lossy):
    """Surface and bulk DOS, lossless vs dissipative."""
    eta = 1e-3
    lossless = ChainParams()
    lossy = ChainParams(gamma=gamma_lossy)
    c_lossless = effective_couplings(lossless)
    c_lossy = effective_couplings(lossy)
    omegas = np.linspace(-3.0, 3.0, 601)
    rows = []
    for label, c in (("surface_lossless", c_lossless), ("surface_lossy", c_lossy)):
        for w in omegas:
            surf = solve_surface_gf(c, w + 1j * eta, eta=eta)
            rows.append((w, label, local_dos(gf_pair(surf, c, 0, 0))))
    for label, c in (("bulk_lossless", c_lossless), ("bulk_lossy", c_lossy)):
        for w in omegas:
            rows.append((w, label, glue_dos(c, w, eta=eta)))
    cfg = _preset_config("fig4", out_path, fmt, lossy, eta=eta,
                         omega_min=-3.0, omega_max=3.0, omega_points=601)
    cfg.validate()
    _write_table(cfg.output_path, fmt, ("omega", "case", "dos"), rows)
    _write_sidecar(cfg, {"gamma_lossy": gamma_lossy,
                         "lossless": "gamma = pump = 0"})
    sys.exit(0)


@main.command()
@_preset_common
@_guard
def fig5(out_path, fmt):
    """Semi-infinite G_{5,4} against a dense 45-site reference."""
    params = FIG5_PARAMS
    c = effective_couplings(params)
    eta = 1e-6
    n_ref = 45
    matrix = build_dynamical_matrix(params, n_ref)
    omegas = np.linspace(-4.0, 4.0, 801)
    rows = []
    for w in omegas:
        surf = solve_surface_gf(c, w + 1j * eta, eta=eta)
        semi = gf_pair(surf, c, 5, 4)
        dense = dense_gf(matrix, w + 1j * eta)[5, 4]
        rows.append((w, semi.real, semi.imag, dense.real, dense.imag))
    cfg = _preset_config("fig5", out_path, fmt, params, eta=eta,
                         omega_min=-4.0, omega_max=4.0, omega_points=801,
                         n_sites=n_ref)
    cfg.validate()
    _write_table(cfg.output_path, fmt,
                 ("omega", "re_semi", "im_semi", "re_dense", "im_dense"), rows)
    _write_sidecar(cfg, {"element": [5, 4], "reference_n_sites": n_ref})
    sys.exit(0)


@main.command()
@_preset_common
@_guard
def fig6(out_path, fmt):
    """Amplification exponent and winding number across the band."""
    params = FIG6_PARAMS
    c = effective_couplings(params)
    eta = 1e-6
    omegas = np.linspace(-3.0, 3.0, 601)
    xi_raw = []
    for w in omegas:
        surf = solve_surface_gf(c, w + 1j * eta, eta=eta)
        corr = correlation_data(surf, c)
        xi_raw.append(corr.xi_plus)
    xi_arr = np.array(xi_raw)
    xi_smooth = unwrap_imag(xi_arr)
    rows = []
    for w, raw, smooth in zip(omegas, xi_arr, xi_smooth):
        try:
            w1 = float(winding_number(params, float(w)))
        except GapClosingError:
            w1 = math.nan
        ind = 1.0 if raw.real > 0 else 0.0
        rows.append((w, raw.real, smooth.imag, w1, ind))
    cfg = _preset_config("fig6", out_path, fmt, params, eta=eta,
                         omega_min=-3.0, omega_max=3.0, omega_points=601)
    cfg.validate()
    _write_table(cfg.output_path, fmt,
                 ("omega", "re_xi", "im_xi", "W1", "indicator"), rows)
    _write_sidecar(cfg, {"direction": "plus (columns; the only finite one here)",
                         "boundary_marker": "nan"})
    sys.exit(0)


@main.command()
@_preset_common
@_guard
def fig7(out_path, fmt):
    """Damped wavefront on a 15-site reciprocal chain, exact vs closed form."""
    cfg = _preset_config("transient", out_path, fmt, FIG7_PARAMS,
                         sites=tuple(range(15)), t_max=20.0, dt=0.05,
                         extra={"seed_amp": 1.0, "compare_oracle": 15})
    cfg.output_path = out_path or f"fig7.{fmt}"
    sys.exit(run(cfg))


@main.command()
@_preset_common
@_guard
def fig8(out_path, fmt):
    """Even-site amplitudes in the two amplifying transient regimes."""
    eta = 1e-6
    t_grid = np.linspace(0.0, 30.0, 3001)
    sites = (2, 4, 6, 8)
    rows = []
    cases = (("top", 2.0), ("bottom", 1.0))
    for label, gamma in cases:
        params = hatano_nelson_params(epsilon=FIG8_BASE["epsilon"],
                                      phi=FIG8_BASE["phi"], gamma=gamma,
                                      pump=FIG8_BASE["pump"])
        tp = TransientParams.from_chain(params)
        for j in sites:
            amps = coherent_evolution(tp, j, t_grid)
            for t, a in zip(t_grid, amps):
                rows.append((label, t, j, a.real, a.imag))
    cfg = _preset_config("fig8", out_path, fmt,
                         hatano_nelson_params(epsilon=0.0, phi=FIG8_BASE["phi"],
                                              gamma=2.0, pump=FIG8_BASE["pump"]),
                         eta=eta, t_max=30.0, dt=0.01, sites=sites)
    cfg.validate()
    _write_table(cfg.output_path, fmt, ("case", "t", "site", "re", "im"), rows)
    _write_sidecar(cfg, {"cases": {"top": "gamma=2", "bottom": "gamma=1"},
                         "even_sites_only": True})
    sys.exit(0)


@main.command()
@_preset_common
@click.option("--grid-points", type=int, default=40, show_default=True)
@click.option("--n-sites", type=int, default=40, show_default=True)
@_guard
def fig9(out_path, fmt, grid_points, n_sites):
    """Stability/topology diagram over the loss-pump plane."""
    cfg = _preset_config("phases", out_path, fmt, FIG9_TEMPLATE,
                         n_sites=n_sites,
                         extra={"gamma_min": 0.1, "gamma_max": 4.0,
                                "gamma_points": grid_points, "pump_min": 0.1,
                                "pump_max": 4.0, "pump_points": grid_points,
                                "omega": 0.0})
    cfg.output_path = out_path or f"fig9.{fmt}"
    sys.exit(run(cfg))


@main.command()
@_preset_common
@_guard
def fig10(out_path, fmt):
    """Gain and added noise of the strongly pumped amplifier."""
    eta = 1e-6
    caption = FIG10_PARAMS
    driven = caption.mirrored()
    c = effective_couplings(driven)
    sites = (5, 10, 15, 20)
    omegas = np.linspace(-3.0, 3.0, 601)
    gain_rows, noise_rows = [], []
    max_l = 0
    for w in omegas:
        surf = solve_surface_gf(c, w + 1j * eta, eta=eta)
        corr = correlation_data(surf, c)
        for j in sites:
            g = gain_of(surf, corr, driven.gamma, j)
            db = 10.0 * math.log10(g) if g > 0 else -math.inf
            gain_rows.append((w, j, db))
            report = hatano_noise(driven, w + 1j * eta, j, eta=eta)
            max_l = max(max_l, report.l_max)
            noise_rows.append((w, j, report.n_add))
    stem = out_path or "fig10"
    if stem.endswith(f".{fmt}"):
        stem = stem[: -len(fmt) - 1]
    gain_path = f"{stem}_gain.{fmt}"
    noise_path = f"{stem}_noise.{fmt}"
    _write_table(gain_path, fmt, ("omega", "site", "gain_db"), gain_rows)
    _write_table(noise_path, fmt, ("omega", "site", "n_add"), noise_rows)
    cfg = _preset_config("fig10", gain_path, fmt, caption, eta=eta,
                         omega_min=-3.0, omega_max=3.0, omega_points=601,
                         sites=sites)
    cfg.validate()
    notes = {
        "port": "mirrored (phi -> -phi relabels sites so the drive enters "
                "the amplifying end; same chain as the caption parameters)",
        "outputs": [gain_path, noise_path],
        "max_l_max": max_l,
    }
    _write_sidecar(cfg, notes)
    cfg.output_path = noise_path
    _write_sidecar(cfg, notes)
    sys.exit(0)


if __name__ == "__main__":
    main()
