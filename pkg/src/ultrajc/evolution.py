"""Fixed-step RK4 propagation of pure states.

The integrator never renormalises.  Norm drift beyond ``NORM_DRIFT_LIMIT``
and step-doubling local-error estimates beyond the configured tolerance both
raise :class:`~ultrajc.errors.AccuracyError`.

Several Hamiltonians can be propagated together on one grid.  Hamiltonians
that share their term matrices (a sweep over ``xi`` and ``nu`` at fixed
``g`` and detuning) are evaluated with one batched matrix product per term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import AccuracyError, ConfigError, DimensionMismatchError
from .hamiltonians import ModelParams, TimeDependentHamiltonian
from .hilbert import HilbertDims, QuantumState, qubit_index

NORM_DRIFT_LIMIT = 1e-6
STEPS_PER_PERIOD = 50
# h * ||H|| bound for the default step; RK4 is stable up to ~2.8 on the imaginary axis.
ACCURACY_NORM_STEP = 0.03
STABILITY_NORM_STEP = 2.5


def max_dt(params: ModelParams, dims: HilbertDims) -> float:
    """Largest step allowed by the resolution invariant of :class:`PropagationConfig`."""
    nu_eff = max(params.nu, params.omega_0)
    periods = [2 * math.pi / nu_eff, 2 * math.pi / params.omega_0, 2 * math.pi / params.omega_c]
    if params.g > 0:
        periods.append(math.pi / (params.g * math.sqrt(dims.fock_cutoff)))
    return min(periods) / STEPS_PER_PERIOD


def suggest_dt(
    params: ModelParams,
    dims: HilbertDims,
    hamiltonians: Iterable[TimeDependentHamiltonian] = (),
) -> float:
    dt = max_dt(params, dims)
    fastest = params.omega_0 + params.omega_c + 2 * params.xi * params.nu
    dt = min(dt, 2 * math.pi / (STEPS_PER_PERIOD * fastest))
    for h in hamiltonians:
        bound = h.norm_bound
        if bound > 0:
            dt = min(dt, ACCURACY_NORM_STEP / bound)
        if h.max_phase_rate > 0:
            dt = min(dt, 2 * math.pi / (STEPS_PER_PERIOD * h.max_phase_rate))
    return dt


@dataclass(frozen=True)
class PropagationConfig:
    t_end: float
    dt: float
    t_start: float = 0.0
    sampling_stride: int = 1
    tolerance: float = 1e-9
    audit_count: int = 8

    def __post_init__(self):
        for name in ("t_start", "t_end", "dt", "tolerance"):
            value = getattr(self, name)
            if value is None or not math.isfinite(value):
                raise ConfigError(f"PropagationConfig.{name} must be a finite number, got {value!r}")
        if self.dt <= 0:
            raise ConfigError(f"PropagationConfig.dt must be positive, got {self.dt}")
        if self.t_end <= self.t_start:
            raise ConfigError("PropagationConfig requires t_end > t_start")
        if int(self.sampling_stride) != self.sampling_stride or self.sampling_stride < 1:
            raise ConfigError("PropagationConfig.sampling_stride must be an integer >= 1")
        if self.tolerance <= 0:
            raise ConfigError("PropagationConfig.tolerance must be positive")

    @classmethod
    def auto(
        cls,
        params: ModelParams,
        dims: HilbertDims,
        t_end: float,
        *,
        hamiltonians: Iterable[TimeDependentHamiltonian] = (),
        t_start: float = 0.0,
        sample_spacing: Optional[float] = None,
        **kwargs,
    ) -> "PropagationConfig":
        """Config with the default step; with ``sample_spacing`` samples land on a uniform grid."""
        dt = suggest_dt(params, dims, hamiltonians)
        stride = 1
        if sample_spacing is not None:
            stride = max(1, math.ceil(sample_spacing / dt - 1e-9))
            dt = sample_spacing / stride
        return cls(t_end=t_end, dt=dt, t_start=t_start, sampling_stride=stride, **kwargs)

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil((self.t_end - self.t_start) / self.dt - 1e-9))

    @property
    def step(self) -> float:
        """Actual step: ``dt`` shrunk so the grid ends exactly at ``t_end``."""
        return (self.t_end - self.t_start) / self.n_steps

    def record_steps(self) -> np.ndarray:
        steps = np.arange(0, self.n_steps + 1, self.sampling_stride)
        if steps[-1] != self.n_steps:
            steps = np.append(steps, self.n_steps)
        return steps

    def sample_times(self) -> np.ndarray:
        return self.t_start + self.record_steps() * self.step

    def halved(self) -> "PropagationConfig":
        return PropagationConfig(
            self.t_end, self.step / 2, self.t_start, self.sampling_stride * 2, self.tolerance, self.audit_count
        )

    def check_against(self, hamiltonian: TimeDependentHamiltonian) -> None:
        params = hamiltonian.params
        if params is not None:
            limit = max_dt(params, hamiltonian.dims)
            if self.step > limit * (1 + 1e-12):
                raise ConfigError(
                    f"PropagationConfig.dt={self.step:.4g} exceeds the resolution limit {limit:.4g}"
                )
        if self.step * hamiltonian.norm_bound > STABILITY_NORM_STEP:
            raise ConfigError(
                f"PropagationConfig.dt={self.step:.4g} is unstable for ||H|| <= {hamiltonian.norm_bound:.4g}"
            )


@dataclass
class Trajectory:
    times: np.ndarray
    records: dict
    dims: HilbertDims
    final: QuantumState
    states: Optional[np.ndarray] = None
    target_final: Optional[QuantumState] = None
    target_states: Optional[np.ndarray] = None
    audit_error: float = 0.0
    config: Optional[PropagationConfig] = field(default=None, repr=False)

    def __len__(self):
        return len(self.times)

    def state_at(self, i: int) -> QuantumState:
        if self.states is None:
            raise ValueError("trajectory was propagated without keep_states=True")
        return QuantumState(self.states[i], self.dims)


def population_label(target) -> str:
    if isinstance(target, str):
        return f"P[{target}]"
    q, n = target
    return f"P[{'ge'[qubit_index(q)]},{int(n)}]"


def population_values(amplitudes: np.ndarray, target, dims: HilbertDims) -> np.ndarray:
    """Populations of ``target`` for amplitude rows of shape (..., dim)."""
    probs = np.abs(amplitudes) ** 2
    if isinstance(target, str):
        k = qubit_index(target) * dims.n_fock
        return probs[..., k : k + dims.n_fock].sum(axis=-1)
    q, n = target
    return probs[..., dims.encode(q, n)]


class _BatchGenerator:
    """Right-hand side ``-i H_b(t) psi_b`` for a batch of Hamiltonians."""

    def __init__(self, hamiltonians: Sequence[TimeDependentHamiltonian]):
        self.groups = []
        remaining = list(range(len(hamiltonians)))
        while remaining:
            lead = remaining[0]
            members = [b for b in remaining if _same_structure(hamiltonians[lead], hamiltonians[b])]
            remaining = [b for b in remaining if b not in members]
            h0 = hamiltonians[lead]
            mats = [t.matrix.T for t in h0.terms]
            adj = [t.matrix.conj() if t.paired else None for t in h0.terms]
            coeffs = [[hamiltonians[b].terms[k].coeff for b in members] for k in range(len(h0.terms))]
            self.groups.append((np.array(members), mats, adj, coeffs))
        self.batch = len(hamiltonians)

    def coefficients(self, t: float):
        tables = []
        for _, _, _, coeffs in self.groups:
            tables.append(
                [None if c[0] is None else np.array([f(t) for f in c], dtype=complex)[:, None] for c in coeffs]
            )
        return tables

    def __call__(self, tables, psi: np.ndarray) -> np.ndarray:
        out = np.empty_like(psi)
        for (rows, mats, adj, _), table in zip(self.groups, tables):
            block = psi[rows] if len(rows) != self.batch else psi
            acc = np.zeros_like(block)
            for m, m_adj, c in zip(mats, adj, table):
                if c is None:
                    acc += block @ m
                else:
                    acc += c * (block @ m)
                    if m_adj is not None:
                        acc += np.conj(c) * (block @ m_adj)
            if len(rows) == self.batch:
                out = acc
            else:
                out[rows] = acc
        return -1j * out


def _same_structure(a: TimeDependentHamiltonian, b: TimeDependentHamiltonian) -> bool:
    if a is b:
        return True
    if a.dims != b.dims or len(a.terms) != len(b.terms):
        return False
    for ta, tb in zip(a.terms, b.terms):
        if ta.paired != tb.paired or (ta.coeff is None) != (tb.coeff is None):
            return False
        if ta.matrix is not tb.matrix and not np.array_equal(ta.matrix, tb.matrix):
            return False
    return True


def _rk4_step(gen, c0, c_mid, c1, y, h):
    k1 = gen(c0, y)
    k2 = gen(c_mid, y + (h / 2) * k1)
    k3 = gen(c_mid, y + (h / 2) * k2)
    k4 = gen(c1, y + h * k3)
    return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def _check_initial(psi0: QuantumState, hamiltonians) -> None:
    for h in hamiltonians:
        if h.dims != psi0.dims:
            raise DimensionMismatchError("initial state and Hamiltonian live on different spaces")
    if abs(psi0.norm_squared - 1) > NORM_DRIFT_LIMIT:
        raise ValueError(f"initial state is not normalised (norm^2 = {psi0.norm_squared!r})")


def _run(hamiltonians, psi0: QuantumState, cfg: PropagationConfig, on_sample=None) -> tuple[np.ndarray, float]:
    """Propagate ``psi0`` under every Hamiltonian; returns final rows and the worst audit estimate."""
    _check_initial(psi0, hamiltonians)
    for h in hamiltonians:
        cfg.check_against(h)
    gen = _BatchGenerator(hamiltonians)
    n, h = cfg.n_steps, cfg.step
    record = set(cfg.record_steps().tolist())
    audits = set(np.unique(np.linspace(0, n - 1, min(cfg.audit_count, n)).round().astype(int)).tolist())
    y = np.tile(psi0.amplitudes, (len(hamiltonians), 1))
    worst = 0.0

    def check_norm(y, t):
        drift = np.max(np.abs(np.einsum("bi,bi->b", y.conj(), y).real - 1))
        if drift > NORM_DRIFT_LIMIT:
            raise AccuracyError(
                f"norm drift {drift:.3g} exceeds {NORM_DRIFT_LIMIT:g} at t={t:.6g}; reduce dt below {h / 2:.4g}",
                suggested_dt=h / 2,
            )

    if on_sample is not None:
        on_sample(0, cfg.t_start, y)
    c0 = gen.coefficients(cfg.t_start)
    for k in range(n):
        t = cfg.t_start + k * h
        c_mid = gen.coefficients(t + h / 2)
        c1 = gen.coefficients(cfg.t_start + (k + 1) * h)
        y_next = _rk4_step(gen, c0, c_mid, c1, y, h)
        if k in audits:
            cq1, cq3 = gen.coefficients(t + h / 4), gen.coefficients(t + 3 * h / 4)
            y_half = _rk4_step(gen, c0, cq1, c_mid, y, h / 2)
            y_half = _rk4_step(gen, c_mid, cq3, c1, y_half, h / 2)
            err = float(np.max(np.linalg.norm(y_next - y_half, axis=1))) / 15
            worst = max(worst, err)
            if err > cfg.tolerance:
                suggestion = 0.9 * h * (cfg.tolerance / err) ** 0.2
                raise AccuracyError(
                    f"local error estimate {err:.3g} exceeds tolerance {cfg.tolerance:g} at t={t:.6g}; "
                    f"reduce dt below {suggestion:.4g}",
                    suggested_dt=suggestion,
                )
        y, c0 = y_next, c1
        if k + 1 in record:
            t_next = cfg.t_start + (k + 1) * h
            check_norm(y, t_next)
            if on_sample is not None:
                on_sample(k + 1, t_next, y)
    check_norm(y, cfg.t_end)
    return y, worst


class _Recorder:
    def __init__(self, cfg, dims, columns, targets, keep_states, n_rows):
        steps = cfg.record_steps()
        self.index = {int(s): i for i, s in enumerate(steps)}
        self.times = cfg.t_start + steps * cfg.step
        self.dims, self.columns, self.targets = dims, columns, tuple(targets)
        self.records = {}
        self.states = np.empty((n_rows, len(steps), dims.dim), dtype=complex) if keep_states else None
        self.n_samples = len(steps)

    def put(self, name, i, value):
        if name not in self.records:
            self.records[name] = np.empty(self.n_samples)
        self.records[name][i] = value

    def __call__(self, step, t, y):
        i = self.index[step]
        norms = np.einsum("bi,bi->b", y.conj(), y).real
        for row, prefix in self.columns:
            self.put(f"norm{prefix}", i, norms[row])
            for target in self.targets:
                label = population_label(target)
                if prefix:
                    label = label.replace("P[", f"P{prefix}[", 1)
                self.put(label, i, population_values(y[row], target, self.dims))
        if len(y) == 2 and len(self.columns) == 2:
            self.put("F", i, abs(np.vdot(y[0], y[1])) ** 2)
        if self.states is not None:
            self.states[:, i] = y


def propagate(
    hamiltonian: TimeDependentHamiltonian,
    psi0: QuantumState,
    cfg: PropagationConfig,
    *,
    targets: Sequence = (),
    keep_states: bool = False,
) -> Trajectory:
    """Solve ``i d|psi>/dt = H(t)|psi>`` on the grid described by ``cfg``.

    ``targets`` lists populations to record, either basis states ``(q, n)``
    or qubit marginals ``"g"`` / ``"e"``.  The norm is always recorded.
    """
    rec = _Recorder(cfg, psi0.dims, [(0, "")], targets, keep_states, 1)
    y, worst = _run([hamiltonian], psi0, cfg, rec)
    return Trajectory(
        times=rec.times,
        records=rec.records,
        dims=psi0.dims,
        final=QuantumState(y[0], psi0.dims),
        states=None if rec.states is None else rec.states[0],
        audit_error=worst,
        config=cfg,
    )


def propagate_pair(
    h_exact: TimeDependentHamiltonian,
    h_target: TimeDependentHamiltonian,
    psi0: QuantumState,
    cfg: PropagationConfig,
    *,
    targets: Sequence = (),
    keep_states: bool = False,
) -> Trajectory:
    """Co-propagate the exact and target dynamics and record ``F(t) = |<phi|psi>|^2``.

    Records ``F``, ``norm_exact``, ``norm_target`` and, per entry of
    ``targets``, ``P_exact[...]`` and ``P_target[...]``.
    """
    rec = _Recorder(cfg, psi0.dims, [(0, "_exact"), (1, "_target")], targets, keep_states, 2)
    y, worst = _run([h_exact, h_target], psi0, cfg, rec)
    return Trajectory(
        times=rec.times,
        records=rec.records,
        dims=psi0.dims,
        final=QuantumState(y[0], psi0.dims),
        states=None if rec.states is None else rec.states[0],
        target_final=QuantumState(y[1], psi0.dims),
        target_states=None if rec.states is None else rec.states[1],
        audit_error=worst,
        config=cfg,
    )


def propagate_batch(
    hamiltonians: Sequence[TimeDependentHamiltonian],
    psi0: QuantumState,
    cfg: PropagationConfig,
) -> np.ndarray:
    """Final amplitudes, shape (len(hamiltonians), dim), for one shared initial state."""
    y, _ = _run(list(hamiltonians), psi0, cfg)
    return y


def analytic_jc_evolution(params: ModelParams, psi0: QuantumState, t: float) -> QuantumState:
    """Closed-form evolution under the interaction-picture JC Hamiltonian.

    Each excitation block ``{|e, n-1>, |g, n>}`` is a two-level problem with
    generalised Rabi frequency ``sqrt(delta^2/4 + n g^2)``.  ``|g, 0>`` is dark and
    ``|e, N_c>`` has no partner inside the truncation, so both are left unchanged.
    """
    dims = psi0.dims
    nf = dims.n_fock
    d2 = params.delta / 2
    amps = np.array(psi0.amplitudes)
    out = amps.copy()
    rot_e = np.exp(1j * d2 * t)
    rot_g = np.exp(-1j * d2 * t)
    for n in range(1, nf):
        ie, ig = nf + n - 1, n
        b = params.g * math.sqrt(n)
        omega = math.hypot(d2, b)
        if omega == 0.0:
            continue
        c, s = math.cos(omega * t), math.sin(omega * t) / omega
        ce, cg = amps[ie], amps[ig]
        new_e = (c - 1j * s * d2) * ce - 1j * s * b * cg
        new_g = -1j * s * b * ce + (c + 1j * s * d2) * cg
        out[ie], out[ig] = rot_e * new_e, rot_g * new_g
    return QuantumState(out, dims)
