"""Closed-form JC spectrum, ground-state staircase and phase diagram.

Manifold ``n >= 1`` spans ``{|e, n-1>, |g, n>}`` with energies
``E_{n,+-} = omega_c (n - 1/2) +- sqrt(delta^2/4 + n g^2)``; the vacuum
``|g, 0>`` sits alone at ``-omega_0 / 2``.  Ground-state labels use ``0`` for
the vacuum and ``n`` for ``|n, ->``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NmaxTooSmallError
from .hamiltonians import ModelParams

DEFAULT_N_MAX = 12


@dataclass(frozen=True)
class JCEigenLevel:
    n: int
    branch: Optional[str]
    energy: float
    weights: tuple  # (c_e on |e, n-1>, c_g on |g, n>)

    @property
    def excited_population(self) -> float:
        return self.weights[0] ** 2


def _mixing_angle(params: ModelParams, n: int) -> float:
    # tan(2 phi) = 2 g sqrt(n) / delta, phi in [0, pi/2]
    return 0.5 * math.atan2(2 * params.g * math.sqrt(n), params.delta)


def manifold_energy(params: ModelParams, n: int, branch: str = "-") -> float:
    if n == 0:
        return -params.omega_0 / 2
    root = math.hypot(params.delta / 2, params.g * math.sqrt(n))
    centre = params.omega_c * (n - 0.5)
    return centre - root if branch == "-" else centre + root


def jc_levels(params: ModelParams, n_max: int = DEFAULT_N_MAX) -> list:
    """Vacuum level followed by ``|n, ->``, ``|n, +>`` for ``n = 1 .. n_max``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    levels = [JCEigenLevel(0, None, -params.omega_0 / 2, (0.0, 1.0))]
    for n in range(1, n_max + 1):
        phi = _mixing_angle(params, n)
        levels.append(JCEigenLevel(n, "-", manifold_energy(params, n, "-"), (-math.sin(phi), math.cos(phi))))
        levels.append(JCEigenLevel(n, "+", manifold_energy(params, n, "+"), (math.cos(phi), math.sin(phi))))
    return levels


@dataclass(frozen=True)
class PhasePoint:
    delta: float  # units of omega_c
    g: float  # units of omega_c
    ground_label: int
    ground_energy: float  # units of omega_c
    P_e: float


def ground_state(params: ModelParams, n_max: int = DEFAULT_N_MAX) -> PhasePoint:
    """Lowest JC level; exact ties go to the lower manifold."""
    energies = [manifold_energy(params, n) for n in range(n_max + 1)]
    label = int(np.argmin(energies))
    if label == n_max:
        raise NmaxTooSmallError(f"ground state sits in manifold n_max={n_max}; increase n_max")
    p_e = 0.0 if label == 0 else math.sin(_mixing_angle(params, label)) ** 2
    wc = params.omega_c
    return PhasePoint(params.delta / wc, params.g / wc, label, energies[label] / wc, p_e)


def critical_coupling(params: ModelParams, n: int) -> float:
    """Coupling where ``|n, ->`` and ``|n+1, ->`` (or the vacuum, ``n = 0``) cross.

    Solves ``sqrt(A + (n+1) g^2) - sqrt(A + n g^2) = omega_c`` with
    ``A = delta^2/4``; for ``n = 0`` the crossing is ``g = sqrt(omega_0 omega_c)``.
    """
    wc = params.omega_c
    if n == 0:
        return math.sqrt(params.omega_0 * wc)
    a = params.delta**2 / 4
    u = wc**2 * (1 + 2 * n) + wc * math.sqrt(wc**2 * ((1 + 2 * n) ** 2 - 1) + 4 * a)
    return math.sqrt(u)


@dataclass(frozen=True)
class PhaseDiagram:
    delta_grid: np.ndarray
    g_grid: np.ndarray
    labels: np.ndarray  # shape (len(delta_grid), len(g_grid))
    energies: np.ndarray
    P_e: np.ndarray
    boundary: np.ndarray

    def points(self):
        for i, d in enumerate(self.delta_grid):
            for j, g in enumerate(self.g_grid):
                yield PhasePoint(float(d), float(g), int(self.labels[i, j]), float(self.energies[i, j]), float(self.P_e[i, j]))

    def boundaries_along_g(self, i: int) -> list:
        """Midpoints between consecutive g cells whose labels differ, for row ``i``."""
        row = self.labels[i]
        jumps = np.nonzero(np.diff(row))[0]
        return [0.5 * (self.g_grid[j] + self.g_grid[j + 1]) for j in jumps]


def phase_diagram(
    delta_grid: Sequence[float],
    g_grid: Sequence[float],
    n_max: int = DEFAULT_N_MAX,
    omega_c: float = 1.0,
) -> PhaseDiagram:
    """Ground-state label over a (detuning, coupling) grid given in units of ``omega_c``."""
    deltas = np.asarray(delta_grid, dtype=float)
    gs = np.asarray(g_grid, dtype=float)
    labels = np.zeros((len(deltas), len(gs)), dtype=int)
    energies = np.zeros(labels.shape)
    p_e = np.zeros(labels.shape)
    for i, d in enumerate(deltas):
        for j, g in enumerate(gs):
            pt = ground_state(ModelParams(omega_0=omega_c * (1 + d), omega_c=omega_c, g=g * omega_c), n_max)
            labels[i, j], energies[i, j], p_e[i, j] = pt.ground_label, pt.ground_energy, pt.P_e
    boundary = np.zeros(labels.shape, dtype=bool)
    boundary[:, 1:] |= labels[:, 1:] != labels[:, :-1]
    boundary[:, :-1] |= labels[:, 1:] != labels[:, :-1]
    boundary[1:, :] |= labels[1:, :] != labels[:-1, :]
    boundary[:-1, :] |= labels[1:, :] != labels[:-1, :]
    return PhaseDiagram(deltas, gs, labels, energies, p_e, boundary)


def locate_transitions(
    params: ModelParams,
    g_max: float,
    n_max: int = DEFAULT_N_MAX,
    n_scan: int = 400,
    tol: float = 1e-14,
) -> list:
    """Couplings in ``(0, g_max]`` where the ground-state label changes, found by bisection.

    Returns ``(g_star, label_below, label_above)`` tuples; ``params.g`` is ignored.
    """
    def label(g):
        return ground_state(params.replace(g=g), n_max).ground_label

    grid = np.linspace(0.0, g_max, n_scan + 1)
    labels = [label(g) for g in grid]
    out = []
    for k in range(n_scan):
        if labels[k] == labels[k + 1]:
            continue
        lo, hi = grid[k], grid[k + 1]
        lab_lo = labels[k]
        while hi - lo > tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if label(mid) == lab_lo:
                lo = mid
            else:
                hi = mid
        out.append((0.5 * (lo + hi), labels[k], labels[k + 1]))
    return out
