"""Experiment configurations and the runners that turn them into result tables.

Configs are INI files with one section per concern::

    [experiment]
    kind = fidelity_dynamics
    name = hf_nu5

    [model]            # frequencies in units of omega_0
    omega_c = 1
    g = 0.5
    xi = 2.76
    nu = 5

    [propagation]
    cutoff = 20
    t_end = auto
    dt = auto
    samples_per_period = 400

    [initial_state]
    kind = coherent    # coherent | basis | transfer
    qubit = plus       # g | e | plus
    alpha = 0.1

    [sweep]            # fidelity_sweep only: name = start stop count
    nu = 0 8 50
    xi = 0 3 50

    [spectrum]         # spectrum / phase_diagram, couplings in units of omega_c
    g = 0 3 301
    delta = -0.9 1 96
    n_max = 12

CLI flags override file values.
"""

from __future__ import annotations

import configparser
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .analysis import (
    check_validity,
    rwa_fidelity_trajectory,
    transfer_initial_state,
    transfer_target_state,
    transfer_time,
)
from .errors import ConfigError, ConvergenceError, ParameterError
from .evolution import PropagationConfig, population_label
from .hamiltonians import ModelParams, build_jc_interaction, build_rotating_frame
from .hilbert import HilbertDims, make_basis_state, make_coherent_state
from .spectrum import DEFAULT_N_MAX, jc_levels, phase_diagram
from .sweep import fidelity_sweep, grid_points
from .tables import Column, ResultTable

KINDS = (
    "fidelity_dynamics",
    "fidelity_sweep",
    "population_dynamics",
    "rabi_transfer",
    "spectrum",
    "phase_diagram",
    "validity_report",
)
SWEEP_KINDS = ("fidelity_sweep",)
CONVERGENCE_TOL = 1e-4
SWEEP_CHECK_POINTS = 25


@dataclass(frozen=True)
class InitialState:
    kind: str = "coherent"
    qubit: str = "plus"
    alpha: float = 0.1
    n: int = 0

    def build(self, dims: HilbertDims):
        q = (1.0, 1.0) if self.qubit == "plus" else self.qubit
        if self.kind == "coherent":
            return make_coherent_state(q, self.alpha, dims)
        if self.kind == "basis":
            if self.qubit == "plus":
                raise ConfigError("initial_state: basis states need qubit = g or e")
            return make_basis_state(self.qubit, self.n, dims)
        if self.kind == "transfer":
            return transfer_initial_state(dims)
        raise ConfigError(f"initial_state.kind must be coherent, basis or transfer, got {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "coherent":
            return f"{self.qubit} x |alpha={self.alpha:g}>"
        if self.kind == "basis":
            return f"|{self.qubit},{self.n}>"
        return "(|g>+|e>)|0>/sqrt2"


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    params: ModelParams = field(default_factory=ModelParams)
    name: str = ""
    cutoff: int = 20
    t_end: Optional[float] = None
    dt: Optional[float] = None
    samples_per_period: int = 400
    tolerance: float = 1e-9
    initial: InitialState = field(default_factory=InitialState)
    targets: tuple = ()
    sweep: tuple = ()
    g_axis: SweepAxis = SweepAxis("g", 0.0, 3.0, 301)
    delta_axis: SweepAxis = SweepAxis("delta", -0.9, 1.0, 96)
    n_max: int = DEFAULT_N_MAX
    n_exc: int = 2
    fmt: Optional[str] = None
    out_dir: str = "results"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"experiment.kind must be one of {', '.join(KINDS)}; got {self.kind!r}")
        if self.sweep and self.kind not in SWEEP_KINDS:
            raise ConfigError(f"[sweep] axes are only allowed for {', '.join(SWEEP_KINDS)}")
        if self.kind in SWEEP_KINDS and not self.sweep:
            raise ConfigError(f"{self.kind} needs at least one [sweep] axis")
        if self.cutoff < 1:
            raise ConfigError("propagation.cutoff must be >= 1")
        for axis in self.sweep:
            if axis.count < 1:
                raise ConfigError(f"sweep axis {axis.name} needs count >= 1")
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    @property
    def output_format(self) -> str:
        if self.fmt:
            return self.fmt
        return "json" if self.kind in ("fidelity_sweep", "phase_diagram", "validity_report") else "csv"

    def resolved(self) -> dict:
        p = self.params
        out = {
            "kind": self.kind,
            "name": self.name,
            "model": {"omega_0": p.omega_0, "omega_c": p.omega_c, "g": p.g, "xi": p.xi, "nu": p.nu},
            "cutoff": self.cutoff,
        }
        if self.kind in ("fidelity_dynamics", "population_dynamics", "rabi_transfer", "fidelity_sweep"):
            out["propagation"] = {
                "t_end": self.t_end,
                "dt": self.dt,
                "samples_per_period": self.samples_per_period,
                "tolerance": self.tolerance,
            }
            out["initial_state"] = self.initial.describe()
        if self.sweep:
            out["sweep"] = [[a.name, a.start, a.stop, a.count] for a in self.sweep]
        if self.kind in ("spectrum", "phase_diagram"):
            out["spectrum"] = {"g": [self.g_axis.start, self.g_axis.stop, self.g_axis.count], "n_max": self.n_max}
            if self.kind == "phase_diagram":
                out["spectrum"]["delta"] = [self.delta_axis.start, self.delta_axis.stop, self.delta_axis.count]
        if self.kind == "validity_report":
            out["n_exc"] = self.n_exc
        return out


# --- parsing -----------------------------------------------------------------


def _float(section, key, raw) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}") from None


def _int(section, key, raw) -> int:
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}") from None


def _axis(section, key, raw) -> SweepAxis:
    parts = raw.split()
    if len(parts) != 3:
        raise ConfigError(f"[{section}] {key}: expected 'start stop count', got {raw!r}")
    return SweepAxis(key, _float(section, key, parts[0]), _float(section, key, parts[1]), _int(section, key, parts[2]))


def _target(token: str):
    token = token.strip()
    if token in ("g", "e"):
        return token
    if len(token) >= 2 and token[0] in "ge" and token[1:].isdigit():
        return (token[0], int(token[1:]))
    raise ConfigError(f"[experiment] targets: cannot parse {token!r} (use e.g. g0, e0, g1, e)")


_KNOWN = {
    "experiment": {"kind", "name", "targets"},
    "model": {"omega_c", "g", "xi", "nu", "omega_0"},
    "propagation": {"cutoff", "t_end", "dt", "samples_per_period", "tolerance"},
    "initial_state": {"kind", "qubit", "alpha", "n"},
    "sweep": None,
    "spectrum": {"g", "delta", "n_max"},
    "analysis": {"n_exc"},
    "output": {"format", "dir"},
}


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    for section in cp.sections():
        if section not in _KNOWN:
            raise ConfigError(f"unknown section [{section}]")
        allowed = _KNOWN[section]
        if allowed is not None:
            for key in cp[section]:
                if key not in allowed:
                    raise ConfigError(f"[{section}] unknown key {key!r}")
    if not cp.has_option("experiment", "kind"):
        raise ConfigError("[experiment] kind is required")
    exp = cp["experiment"]
    kwargs = {"kind": exp["kind"].strip(), "name": exp.get("name", "").strip()}
    if "targets" in exp:
        kwargs["targets"] = tuple(_target(t) for t in exp["targets"].split(","))

    model = cp["model"] if cp.has_section("model") else {}
    if "omega_0" in model and _float("model", "omega_0", model["omega_0"]) != 1.0:
        raise ConfigError("[model] omega_0 is the unit of frequency and must be 1")
    model_values = {k: _float("model", k, model[k]) for k in ("omega_c", "g", "xi", "nu") if k in model}
    prop = cp["propagation"] if cp.has_section("propagation") else {}
    try:
        kwargs["params"] = ModelParams(**model_values)
    except ParameterError as exc:
        if "dt" not in prop or prop["dt"].strip() == "auto":
            raise ConfigError(f"PropagationConfig: dt is missing and cannot be derived: [model] {exc}") from None
        raise ConfigError(f"[model] {exc}") from None

    if "cutoff" in prop:
        kwargs["cutoff"] = _int("propagation", "cutoff", prop["cutoff"])
    for key in ("t_end", "dt"):
        if key in prop and prop[key].strip() != "auto":
            kwargs[key] = _float("propagation", key, prop[key])
    if "samples_per_period" in prop:
        kwargs["samples_per_period"] = _int("propagation", "samples_per_period", prop["samples_per_period"])
    if "tolerance" in prop:
        kwargs["tolerance"] = _float("propagation", "tolerance", prop["tolerance"])

    if cp.has_section("initial_state"):
        ini = cp["initial_state"]
        kwargs["initial"] = InitialState(
            kind=ini.get("kind", "coherent").strip(),
            qubit=ini.get("qubit", "plus").strip(),
            alpha=_float("initial_state", "alpha", ini.get("alpha", "0.1")),
            n=_int("initial_state", "n", ini.get("n", "0")),
        )
    if cp.has_section("sweep"):
        kwargs["sweep"] = tuple(_axis("sweep", k, v) for k, v in cp["sweep"].items())
    if cp.has_section("spectrum"):
        sp = cp["spectrum"]
        if "g" in sp:
            kwargs["g_axis"] = _axis("spectrum", "g", sp["g"])
        if "delta" in sp:
            kwargs["delta_axis"] = _axis("spectrum", "delta", sp["delta"])
        if "n_max" in sp:
            kwargs["n_max"] = _int("spectrum", "n_max", sp["n_max"])
    if cp.has_section("analysis") and "n_exc" in cp["analysis"]:
        kwargs["n_exc"] = _int("analysis", "n_exc", cp["analysis"]["n_exc"])
    if cp.has_section("output"):
        out = cp["output"]
        if "format" in out:
            kwargs["fmt"] = out["format"].strip()
        if "dir" in out:
            kwargs["out_dir"] = out["dir"].strip()
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    return parse_config(text, str(path))


# --- runners -----------------------------------------------------------------


def _default_t_end(cfg: ExperimentConfig) -> float:
    if cfg.t_end is not None:
        return cfg.t_end
    p = cfg.params
    if cfg.kind == "rabi_transfer":
        return transfer_time(p)
    if p.g <= 0:
        raise ConfigError("PropagationConfig: t_end is missing and cannot be derived (g = 0)")
    return 2 * math.pi / p.g


def _sample_spacing(cfg: ExperimentConfig, t_end: float) -> float:
    # samples_per_period samples per Rabi period pi/g, rounded to divide t_end
    p = cfg.params
    period = math.pi / p.g if p.g > 0 else 2 * math.pi / p.omega_0
    n = max(1, round(t_end / (period / cfg.samples_per_period)))
    return t_end / n


def _propagation(cfg: ExperimentConfig, dims: HilbertDims, hamiltonians=()) -> PropagationConfig:
    t_end = _default_t_end(cfg)
    spacing = _sample_spacing(cfg, t_end)
    if cfg.dt is None:
        return PropagationConfig.auto(
            cfg.params, dims, t_end, hamiltonians=hamiltonians, sample_spacing=spacing, tolerance=cfg.tolerance
        )
    stride = max(1, math.ceil(spacing / cfg.dt - 1e-9))
    return PropagationConfig(t_end=t_end, dt=spacing / stride, sampling_stride=stride, tolerance=cfg.tolerance)


def _dynamics(cfg: ExperimentConfig, cutoff: int):
    dims = HilbertDims(cutoff)
    psi0 = transfer_initial_state(dims) if cfg.kind == "rabi_transfer" else cfg.initial.build(dims)
    hams = [build_rotating_frame(cfg.params, dims), build_jc_interaction(cfg.params, dims)]
    pcfg = _propagation(cfg, dims, hams)
    targets = cfg.targets
    if cfg.kind == "population_dynamics" and not targets:
        targets = (("g", 0),) if cfg.initial.qubit == "g" else (("e", 0), ("g", 1))
    if cfg.kind == "rabi_transfer" and not targets:
        targets = ("e",)
    traj = rwa_fidelity_trajectory(cfg.params, initial=psi0, cfg=pcfg, targets=targets)
    return traj, targets


def _dynamics_table(cfg: ExperimentConfig, traj, targets) -> ResultTable:
    t_unit = "1/omega_0"
    if cfg.kind == "fidelity_dynamics":
        names = ["F", "norm_exact", "norm_target"]
        cols = [Column("t", t_unit)] + [Column(n) for n in names]
    elif cfg.kind == "population_dynamics":
        names = []
        for prefix in ("P_exact", "P_target"):
            names += [population_label(t).replace("P[", f"{prefix}[", 1) for t in targets]
        names.append("norm_exact")
        cols = [Column("t", t_unit)] + [Column(n) for n in names]
    else:  # rabi_transfer
        names = ["F"] + [population_label(t).replace("P[", "P_exact[", 1) for t in targets]
        names += [population_label(t).replace("P[", "P_target[", 1) for t in targets]
        cols = [Column("t", t_unit)] + [Column(n) for n in names]
    rows = []
    for i, t in enumerate(traj.times):
        rows.append([float(t)] + [float(traj.records[n][i]) for n in names])
    return ResultTable(cfg.name, cols, rows)


def _max_change(a: ResultTable, b: ResultTable, skip=("t",)) -> float:
    worst = 0.0
    for k, name in enumerate(a.names):
        if name in skip:
            continue
        for ra, rb in zip(a.rows, b.rows):
            if isinstance(ra[k], float):
                worst = max(worst, abs(ra[k] - rb[k]))
    return worst


def _convergence(check: str, cutoff: int, change: float) -> dict:
    return {
        "check": check,
        "cutoff": cutoff,
        "doubled_cutoff": 2 * cutoff,
        "max_abs_change": change,
        "tolerance": CONVERGENCE_TOL,
        "verdict": "converged" if change < CONVERGENCE_TOL else "NOT CONVERGED",
    }


def _run_dynamics(cfg: ExperimentConfig) -> ResultTable:
    traj, targets = _dynamics(cfg, cfg.cutoff)
    table = _dynamics_table(cfg, traj, targets)
    traj2, _ = _dynamics(cfg, 2 * cfg.cutoff)
    check = _dynamics_table(cfg, traj2, targets)
    if len(check.rows) != len(table.rows):
        raise ConvergenceError("cutoff-doubling rerun produced a different time grid")
    table.metadata["convergence"] = _convergence("cutoff_doubling", cfg.cutoff, _max_change(table, check))
    table.metadata["audit_local_error"] = traj.audit_error
    if cfg.kind == "rabi_transfer":
        dims = HilbertDims(cfg.cutoff)
        target = transfer_target_state(cfg.params, dims)
        if abs(traj.times[-1] - transfer_time(cfg.params)) < 1e-12:
            table.metadata["transfer_fidelity"] = float(abs(np.vdot(target.amplitudes, traj.final.amplitudes)) ** 2)
    return table


def _run_sweep(cfg: ExperimentConfig, workers) -> ResultTable:
    if cfg.initial.kind != "coherent" or cfg.initial.qubit != "plus":
        raise ConfigError("fidelity_sweep supports only the (|g>+|e>)|alpha>/sqrt2 initial state")
    axes = [(a.name, a.values()) for a in cfg.sweep]
    points = grid_points(cfg.params, axes)
    chunk = len(axes[-1][1])
    f = fidelity_sweep(points, cutoff=cfg.cutoff, alpha=cfg.initial.alpha, t=cfg.t_end, chunk_size=chunk, workers=workers)
    names = [a.name for a in cfg.sweep]
    units = {"g": "omega_0", "nu": "omega_0", "omega_c": "omega_0", "xi": ""}
    cols = [Column(n, units[n]) for n in names] + [Column("F")]
    rows = [[getattr(p, n) for n in names] + [float(v)] for p, v in zip(points, f)]
    table = ResultTable(cfg.name, cols, rows)
    step = max(1, math.ceil(len(points) / SWEEP_CHECK_POINTS))
    subset = list(range(0, len(points), step))
    f2 = fidelity_sweep([points[i] for i in subset], cutoff=2 * cfg.cutoff, alpha=cfg.initial.alpha,
                        t=cfg.t_end, chunk_size=len(subset), workers=1)
    change = float(np.max(np.abs(f[subset] - f2))) if subset else 0.0
    table.metadata["convergence"] = _convergence(f"cutoff_doubling on {len(subset)} sweep points", cfg.cutoff, change)
    return table


def _run_spectrum(cfg: ExperimentConfig) -> ResultTable:
    p = cfg.params
    gs = cfg.g_axis.values() * p.omega_c
    n_max = cfg.n_max
    cols = [Column("g", "omega_0"), Column("E_g0", "omega_0")]
    for n in range(1, n_max + 1):
        cols += [Column(f"E_{n}-", "omega_0"), Column(f"E_{n}+", "omega_0")]
    rows = []
    for g in gs:
        rows.append([float(g)] + [lvl.energy for lvl in jc_levels(p.replace(g=float(g)), n_max)])
    table = ResultTable(cfg.name, cols, rows)
    table.metadata["convergence"] = {"check": "none", "verdict": "not applicable (closed form)"}
    return table


def _run_phase_diagram(cfg: ExperimentConfig) -> ResultTable:
    diag = phase_diagram(cfg.delta_axis.values(), cfg.g_axis.values(), cfg.n_max, omega_c=1.0)
    cols = [Column("delta", "omega_c"), Column("g", "omega_c"), Column("ground_label"),
            Column("ground_energy", "omega_c"), Column("P_e"), Column("boundary")]
    rows = []
    for i, d in enumerate(diag.delta_grid):
        for j, g in enumerate(diag.g_grid):
            rows.append([float(d), float(g), int(diag.labels[i, j]), float(diag.energies[i, j]),
                         float(diag.P_e[i, j]), bool(diag.boundary[i, j])])
    table = ResultTable(cfg.name, cols, rows)
    table.metadata["convergence"] = {"check": "none", "verdict": "not applicable (closed form)"}
    return table


def _run_validity(cfg: ExperimentConfig) -> ResultTable:
    t_max = cfg.t_end
    report = check_validity(cfg.params, cfg.n_exc, t_max)
    cols = [Column("name"), Column("inequality"), Column("left"), Column("right"), Column("ratio"),
            Column("status"), Column("required")]
    rows = [[c.name, c.text, c.left, c.right, c.ratio, c.status, c.required] for c in report.conditions]
    table = ResultTable(cfg.name, cols, rows)
    table.metadata["regime"] = report.regime
    table.metadata["valid"] = report.valid
    if report.sidebands is not None:
        sb = report.sidebands
        table.metadata["sideband"] = {"n0": sb.n0, "delta_n0": sb.delta_n0, "g_c": sb.g_c, "tie": sb.tie}
    table.metadata["convergence"] = {"check": "none", "verdict": "not applicable (closed form)"}
    return table


def run_experiment(
    cfg: ExperimentConfig,
    *,
    workers: Optional[int] = None,
    timestamp: bool = True,
) -> ResultTable:
    if cfg.kind in ("fidelity_dynamics", "population_dynamics", "rabi_transfer"):
        table = _run_dynamics(cfg)
    elif cfg.kind == "fidelity_sweep":
        table = _run_sweep(cfg, workers)
    elif cfg.kind == "spectrum":
        table = _run_spectrum(cfg)
    elif cfg.kind == "phase_diagram":
        table = _run_phase_diagram(cfg)
    else:
        table = _run_validity(cfg)
    meta = {"table": cfg.name, "version": __version__, "config": cfg.resolved()}
    meta.update(table.metadata)
    if timestamp:
        meta["created"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    table.metadata = meta
    return table


def with_overrides(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    changes = {k: v for k, v in changes.items() if v is not None}
    return replace(cfg, **changes) if changes else cfg


def failed_checks(table: ResultTable) -> list:
    conv = table.metadata.get("convergence", {})
    if conv.get("verdict") == "NOT CONVERGED":
        return [f"{table.name}: {conv['check']} changed results by {conv['max_abs_change']:.3g} "
                f"(tolerance {conv['tolerance']:g})"]
    return []
