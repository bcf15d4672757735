"""Sideband decomposition, RWA validity checks and fidelity figures of merit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bessel import MAX_ORDER, bessel_j_symmetric
from .errors import RegimeError
from .evolution import (
    PropagationConfig,
    Trajectory,
    analytic_jc_evolution,
    population_label,
    population_values,
    propagate,
    propagate_batch,
    propagate_pair,
)
from .hamiltonians import ModelParams, build_jc_interaction, build_rotating_frame
from .hilbert import HilbertDims, QuantumState, make_basis_state, make_coherent_state, superposition

MARGIN_FACTOR = 10.0
WARN_FACTOR = 3.0
LOW_THRESHOLD = 0.2
TIE_TOL = 1e-12
DEFAULT_CUTOFF = 20


def tail_order(x: float) -> int:
    """Order past which ``|J_n(x)|`` is negligible: ``x`` plus ten transition widths ``x^(1/3)``."""
    return min(MAX_ORDER, math.ceil(x + 10 * x ** (1 / 3)) + 10)


@dataclass(frozen=True)
class SidebandReport:
    n0: int
    delta_n0: float
    g_c: float
    sideband_table: tuple
    tie: Optional[int] = None

    def row(self, n: int):
        for r in self.sideband_table:
            if r[0] == n:
                return r
        raise KeyError(n)


def sideband_decompose(params: ModelParams, n_window: Optional[int] = None) -> SidebandReport:
    """Jacobi-Anger sidebands ``g J_n(2 xi) exp(i Delta_n t)`` of the counter-rotating term.

    ``n0`` minimises ``|Delta_n| = |omega_0 + omega_c + n nu|``.  On a tie the
    index with the larger ``|J_n(2 xi)|`` wins (the pessimistic choice) and the
    other index is reported in ``tie``.
    """
    if params.nu <= 0:
        raise RegimeError("no sidebands without modulation (nu = 0)")
    s = params.omega_0 + params.omega_c
    x = 2 * params.xi
    candidates = {math.floor(-s / params.nu), math.ceil(-s / params.nu)}
    if n_window is None:
        n_window = min(MAX_ORDER, max(max(abs(c) for c in candidates) + 5, tail_order(x)))
    if any(abs(c) > n_window for c in candidates):
        raise ValueError(f"n_window={n_window} does not contain the dominant sideband")
    orders, values = bessel_j_symmetric(n_window, x)
    table = tuple(
        (int(n), params.sideband_frequency(int(n)), params.g * float(j)) for n, j in zip(orders, values)
    )
    best = min(abs(r[1]) for r in table)
    tied = [r for r in table if abs(abs(r[1]) - best) <= TIE_TOL]
    tied.sort(key=lambda r: (-abs(r[2]), r[0]))
    primary = tied[0]
    tie = tied[1][0] if len(tied) > 1 else None
    return SidebandReport(n0=primary[0], delta_n0=primary[1], g_c=primary[2], sideband_table=table, tie=tie)


def jacobi_anger_sum(xi: float, nu: float, t: float, k: Optional[int] = None) -> complex:
    """Truncated ``sum_{|n|<=k} J_n(2 xi) exp(i n nu t)``; approximates ``exp(2i xi sin(nu t))``."""
    if k is None:
        k = tail_order(2 * xi)
    orders, values = bessel_j_symmetric(k, 2 * xi)
    return complex(np.sum(values * np.exp(1j * orders * nu * t)))


@dataclass(frozen=True)
class Condition:
    name: str
    text: str
    left: float
    right: float
    ratio: float
    status: str
    required: bool = True

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _ratio(left: float, right: float) -> float:
    if math.isnan(left) or math.isnan(right):
        return math.nan
    if right == 0:
        return math.inf if left > 0 else math.nan
    return left / right


def _much_greater(name, text, left, right, required=True) -> Condition:
    r = _ratio(left, right)
    if r >= MARGIN_FACTOR:
        status = "pass"
    elif r >= WARN_FACTOR:
        status = "warn"
    else:
        status = "fail"  # includes nan
    return Condition(name, text, left, right, r, status, required)


def _strict(name, text, left, right, ok: bool) -> Condition:
    return Condition(name, text, left, right, _ratio(left, right), "pass" if ok else "fail")


@dataclass(frozen=True)
class ValidityReport:
    regime: str
    conditions: tuple
    sidebands: Optional[SidebandReport] = field(default=None, repr=False)

    @property
    def valid(self) -> bool:
        """True when every required condition of the detected regime passes."""
        if self.regime == "neither":
            return False
        prefix = f"{self.regime}:"
        return all(c.passed for c in self.conditions if c.required and c.name.startswith(prefix))

    def by_name(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


def classify_regime(params: ModelParams) -> str:
    if params.nu > params.omega_0 + params.omega_c:
        return "high"
    if 0 < params.nu / params.omega_0 <= LOW_THRESHOLD and params.xi * params.nu > 0:
        return "low"
    return "neither"


def _high_conditions(params: ModelParams, n_exc: int):
    p = params
    root_n = math.sqrt(n_exc)
    s = p.omega_0 + p.omega_c
    out = [_strict("high:nu_exceeds_sum", "nu > omega_0 + omega_c", p.nu, s, p.nu > s)]
    if p.nu <= 0:
        nan = math.nan
        for name, text, req in (
            ("high:nu_vs_dominant_detuning", "nu >> |Delta_n0|", False),
            ("high:nu_vs_sideband_couplings", "nu >> g |J_n(2 xi)| sqrt(N), n != n0", True),
            ("high:jc_vs_cr_ratio", "g/|delta| >> |g_c|/|Delta_n0|", True),
            ("high:cr_coupling_vs_detuning", "|Delta_n0| >> |g_c| sqrt(N)", True),
        ):
            out.append(Condition(name, text, nan, nan, nan, "fail", req))
        return out, None
    sb = sideband_decompose(p)
    out.append(
        _much_greater("high:nu_vs_dominant_detuning", "nu >> |Delta_n0|", p.nu, abs(sb.delta_n0), required=False)
    )
    others = max(abs(r[2]) for r in sb.sideband_table if r[0] != sb.n0) * root_n
    out.append(_much_greater("high:nu_vs_sideband_couplings", "nu >> g |J_n(2 xi)| sqrt(N), n != n0", p.nu, others))
    jc_text = "g/|delta| >> |g_c|/|Delta_n0|"
    if p.delta == 0:
        out.append(Condition("high:jc_vs_cr_ratio", jc_text + " (auto-pass at delta = 0)", math.inf,
                             _ratio(abs(sb.g_c), abs(sb.delta_n0)), math.inf, "pass"))
    else:
        out.append(_much_greater("high:jc_vs_cr_ratio", jc_text, p.g / abs(p.delta),
                                 _ratio(abs(sb.g_c), abs(sb.delta_n0)) if sb.g_c else 0.0))
    out.append(
        _much_greater("high:cr_coupling_vs_detuning", "|Delta_n0| >> |g_c| sqrt(N)", abs(sb.delta_n0), abs(sb.g_c) * root_n)
    )
    return out, sb


def _low_conditions(params: ModelParams, n_exc: int, t_max: Optional[float]):
    p = params
    out = [
        _strict("low:modulation_present", "xi nu > 0", p.xi * p.nu, 0.0, p.xi * p.nu > 0),
    ]
    slow = _much_greater("low:slow_modulation", "omega_0 >> nu > 0", p.omega_0, p.nu)
    if p.nu == 0:
        slow = Condition(slow.name, slow.text, slow.left, slow.right, slow.ratio, "fail")
    out.append(slow)
    out.append(
        _much_greater(
            "low:cr_phase_rate",
            "omega_0 + omega_c + 2 xi nu >> g sqrt(N)",
            p.omega_0 + p.omega_c + 2 * p.xi * p.nu,
            p.g * math.sqrt(n_exc),
        )
    )
    out.append(_strict("low:detuning_below_omega0", "delta < omega_0", p.delta, p.omega_0, p.delta < p.omega_0))
    if t_max is not None:
        out.append(_much_greater("low:short_time", "1 >> nu t_max", 1.0, p.nu * t_max, required=False))
    return out


def check_validity(params: ModelParams, n_exc: int, t_max: Optional[float] = None) -> ValidityReport:
    """Score the RWA conditions of both modulation regimes.

    ``a >> b`` passes at ``a / b >= 10`` and warns in ``[3, 10)``.  Only the
    conditions of the detected regime are evaluated, except for ``neither``,
    where both sets are reported.
    """
    if n_exc < 1:
        raise ValueError("largest excitation number N must be >= 1")
    regime = classify_regime(params)
    conditions = []
    sb = None
    if regime in ("high", "neither"):
        high, sb = _high_conditions(params, n_exc)
        conditions += high
    if regime in ("low", "neither"):
        conditions += _low_conditions(params, n_exc, t_max)
    return ValidityReport(regime, tuple(conditions), sb)


def populations(trajectory: Trajectory, targets: Sequence) -> dict:
    """Population time series ``|<target|psi(t)>|^2`` keyed by label (e.g. ``P[e,0]``, ``P[e]``)."""
    out = {}
    for target in targets:
        label = population_label(target)
        if not isinstance(target, str):
            trajectory.dims.encode(*target)
        for key in (label, label.replace("P[", "P_exact[", 1)):
            if key in trajectory.records:
                out[label] = np.asarray(trajectory.records[key])
                break
        else:
            if trajectory.states is None:
                raise ValueError(f"{label} was not recorded and the trajectory holds no states")
            out[label] = population_values(trajectory.states, target, trajectory.dims)
    return out


def fidelity(psi: QuantumState, phi: QuantumState) -> float:
    return abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2


def transfer_time(params: ModelParams) -> float:
    """``t_s = pi / (2 g)``."""
    if params.g <= 0:
        raise ValueError("transfer time needs g > 0")
    return math.pi / (2 * params.g)


def plus_coherent_state(alpha: complex, dims: HilbertDims) -> QuantumState:
    """``(|g> + |e>) |alpha> / sqrt(2)``"""
    return make_coherent_state((1.0, 1.0), alpha, dims)


def rwa_fidelity_trajectory(
    params: ModelParams,
    t_end: Optional[float] = None,
    *,
    dims: Optional[HilbertDims] = None,
    alpha: complex = 0.1,
    initial: Optional[QuantumState] = None,
    sample_spacing: Optional[float] = None,
    targets: Sequence = (),
    cfg: Optional[PropagationConfig] = None,
) -> Trajectory:
    """Exact rotating-frame dynamics against the ideal JC target, with ``F(t)`` recorded."""
    dims = dims or (initial.dims if initial is not None else HilbertDims(DEFAULT_CUTOFF))
    psi0 = initial if initial is not None else plus_coherent_state(alpha, dims)
    h_exact = build_rotating_frame(params, dims)
    h_target = build_jc_interaction(params, dims)
    if cfg is None:
        t_end = transfer_time(params) if t_end is None else t_end
        cfg = PropagationConfig.auto(params, dims, t_end, hamiltonians=[h_exact, h_target], sample_spacing=sample_spacing)
    return propagate_pair(h_exact, h_target, psi0, cfg, targets=targets)


def rwa_fidelity(params: ModelParams, t: Optional[float] = None, **kwargs) -> float:
    """``F(t)`` between exact and JC dynamics; ``t`` defaults to ``t_s = pi/(2g)``."""
    return float(rwa_fidelity_trajectory(params, t, **kwargs).records["F"][-1])


def rwa_fidelity_batch(
    params_list: Sequence[ModelParams],
    t: Optional[float] = None,
    *,
    dims: Optional[HilbertDims] = None,
    alpha: complex = 0.1,
) -> np.ndarray:
    """``F(t)`` for many parameter sets on one shared time grid.

    Points are grouped by ``(omega_0, omega_c, g)``; each group is propagated as
    one batch together with its own JC target.
    """
    dims = dims or HilbertDims(DEFAULT_CUTOFF)
    psi0 = plus_coherent_state(alpha, dims)
    out = np.empty(len(params_list))
    groups: dict = {}
    for i, p in enumerate(params_list):
        groups.setdefault((p.omega_0, p.omega_c, p.g), []).append(i)
    for idx in groups.values():
        members = [params_list[i] for i in idx]
        hams = [build_rotating_frame(p, dims) for p in members]
        target = build_jc_interaction(members[0], dims)
        t_end = transfer_time(members[0]) if t is None else t
        dt = min(
            PropagationConfig.auto(p, dims, t_end, hamiltonians=[h, target]).dt for p, h in zip(members, hams)
        )
        cfg = PropagationConfig(t_end=t_end, dt=dt)
        finals = propagate_batch(hams + [target], psi0, cfg)
        out[idx] = np.abs(finals[:-1].conj() @ finals[-1]) ** 2
    return out


def transfer_initial_state(dims: HilbertDims) -> QuantumState:
    """``(|g> + |e>) |0> / sqrt(2)``"""
    return superposition([(1.0, make_basis_state("g", 0, dims)), (1.0, make_basis_state("e", 0, dims))])


def transfer_target_state(params: ModelParams, dims: HilbertDims) -> QuantumState:
    """Ideal JC image of the transfer input at ``t_s``; at resonance ``|g> (|0> - i|1>)/sqrt(2)``."""
    return analytic_jc_evolution(params, transfer_initial_state(dims), transfer_time(params))


def state_transfer_fidelity(
    params: ModelParams,
    cfg: Optional[PropagationConfig] = None,
    *,
    dims: Optional[HilbertDims] = None,
    hamiltonian=None,
) -> float:
    """Overlap ``|<target|psi(t_s)>|^2`` of the transferred state with the JC target.

    ``hamiltonian`` replaces the exact rotating-frame generator when given.
    """
    dims = dims or HilbertDims(DEFAULT_CUTOFF)
    h = hamiltonian if hamiltonian is not None else build_rotating_frame(params, dims)
    ts = transfer_time(params)
    if cfg is None:
        cfg = PropagationConfig.auto(params, dims, ts, hamiltonians=[h])
    if abs(cfg.t_end - cfg.t_start - ts) > 1e-12 * ts:
        raise ValueError("state transfer runs from t = 0 to t_s = pi/(2g)")
    final = propagate(h, transfer_initial_state(dims), cfg).final
    return fidelity(transfer_target_state(params, dims), final)
