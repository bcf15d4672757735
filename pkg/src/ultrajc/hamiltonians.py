"""Static and frequency-modulated qubit-oscillator Hamiltonians.

Every Hamiltonian is a :class:`TimeDependentHamiltonian`: a sum of fixed
matrices weighted by scalar time-dependent coefficients.  Terms flagged as
``paired`` contribute ``c(t) M + conj(c(t)) M^dag`` so Hermiticity holds by
construction.  The propagator uses the term structure directly instead of
assembling the full matrix at each stage.

Frequencies are in arbitrary common units; the CLI fixes ``omega_0 = 1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ParameterError
from .hilbert import HilbertDims, OperatorMatrix, build_elementary_ops

LABELS = ("lab", "rotating", "jc_interaction", "cr_only", "rabi_static", "jc_static", "custom")


@dataclass(frozen=True)
class ModelParams:
    omega_0: float = 1.0
    omega_c: float = 1.0
    g: float = 0.5
    xi: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        for name in ("omega_0", "omega_c", "g", "xi", "nu"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParameterError(f"{name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.omega_0 <= 0 or self.omega_c <= 0:
            raise ParameterError("omega_0 and omega_c must be positive")
        if self.g < 0 or self.xi < 0 or self.nu < 0:
            raise ParameterError("g, xi and nu must be non-negative")

    @property
    def delta(self) -> float:
        return self.omega_0 - self.omega_c

    @property
    def modulation_amplitude(self) -> float:
        """Frequency excursion ``xi * nu`` of both subsystems."""
        return self.xi * self.nu

    def sideband_frequency(self, n: int) -> float:
        return self.omega_0 + self.omega_c + n * self.nu

    def replace(self, **changes) -> "ModelParams":
        values = {k: getattr(self, k) for k in ("omega_0", "omega_c", "g", "xi", "nu")}
        values.update(changes)
        return ModelParams(**values)


# Coefficients are small frozen dataclasses (not closures) so Hamiltonians
# stay picklable and carry their own modulus bound.


@dataclass(frozen=True)
class Rotating:
    """``exp(i * freq * t)``"""

    freq: float

    def __call__(self, t: float) -> complex:
        return cmath.exp(1j * self.freq * t)

    @property
    def bound(self) -> float:
        return 1.0

    @property
    def max_rate(self) -> float:
        return abs(self.freq)


@dataclass(frozen=True)
class ModulatedPhase:
    """``exp(i * (freq * t + 2 xi sin(nu t)))``"""

    freq: float
    xi: float
    nu: float

    def __call__(self, t: float) -> complex:
        return cmath.exp(1j * (self.freq * t + 2.0 * self.xi * math.sin(self.nu * t)))

    @property
    def bound(self) -> float:
        return 1.0

    @property
    def max_rate(self) -> float:
        return abs(self.freq) + 2.0 * self.xi * self.nu


@dataclass(frozen=True)
class ModulatedFrequency:
    """``base + xi * nu * cos(nu t)`` (real)."""

    base: float
    xi: float
    nu: float

    def __call__(self, t: float) -> float:
        return self.base + self.xi * self.nu * math.cos(self.nu * t)

    @property
    def bound(self) -> float:
        return abs(self.base) + self.xi * self.nu

    @property
    def max_rate(self) -> float:
        return self.nu


@dataclass(frozen=True)
class Reflected:
    """``scale * coeff(t_final - t)``; used to run a Hamiltonian backwards."""

    coeff: Callable
    t_final: float
    scale: float = -1.0

    def __call__(self, t: float):
        return self.scale * self.coeff(self.t_final - t)

    @property
    def bound(self) -> float:
        return abs(self.scale) * getattr(self.coeff, "bound", 1.0)

    @property
    def max_rate(self) -> float:
        return getattr(self.coeff, "max_rate", 0.0)


@dataclass(frozen=True)
class HamiltonianTerm:
    matrix: np.ndarray
    coeff: Optional[Callable] = None
    paired: bool = False

    def value(self, t: float) -> np.ndarray:
        c = 1.0 if self.coeff is None else self.coeff(t)
        if self.paired:
            return c * self.matrix + np.conj(c) * self.matrix.conj().T
        return c * self.matrix

    @property
    def norm_bound(self) -> float:
        c = 1.0 if self.coeff is None else getattr(self.coeff, "bound", 1.0)
        factor = 1.0
        if self.paired and np.any(self.matrix @ self.matrix):
            # for M @ M = 0 the ranges of M and M^dag are orthogonal and
            # ||c M + conj(c) M^dag|| = |c| ||M|| exactly
            factor = 2.0
        return factor * c * float(np.linalg.norm(self.matrix, 2))


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    """``H(t) = sum_k term_k(t)`` on a fixed truncated space."""

    terms: tuple
    dims: HilbertDims
    label: str = "custom"
    params: Optional[ModelParams] = field(default=None, compare=False)

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown Hamiltonian label {self.label!r}")
        object.__setattr__(self, "terms", tuple(self.terms))

    def matrix(self, t: float = 0.0) -> np.ndarray:
        out = np.zeros((self.dims.dim, self.dims.dim), dtype=complex)
        for term in self.terms:
            out += term.value(t)
        return out

    def __call__(self, t: float = 0.0) -> OperatorMatrix:
        return OperatorMatrix(self.matrix(t), self.dims, hermitian=True)

    def apply(self, t: float, psi: np.ndarray) -> np.ndarray:
        """``H(t) @ psi`` without assembling ``H(t)``."""
        out = np.zeros_like(psi, dtype=complex)
        for term in self.terms:
            c = 1.0 if term.coeff is None else term.coeff(t)
            out += c * (term.matrix @ psi)
            if term.paired:
                out += np.conj(c) * (term.matrix.conj().T @ psi)
        return out

    @property
    def is_constant(self) -> bool:
        return all(term.coeff is None for term in self.terms)

    @property
    def norm_bound(self) -> float:
        """Upper bound on the spectral norm of ``H(t)`` over all ``t``."""
        return sum(term.norm_bound for term in self.terms)

    @property
    def max_phase_rate(self) -> float:
        """Largest instantaneous angular frequency carried by any coefficient."""
        rates = [getattr(t.coeff, "max_rate", 0.0) for t in self.terms if t.coeff is not None]
        return max(rates, default=0.0)

    def __add__(self, other: "TimeDependentHamiltonian") -> "TimeDependentHamiltonian":
        if self.dims != other.dims:
            raise ValueError("cannot add Hamiltonians on different spaces")
        return TimeDependentHamiltonian(self.terms + other.terms, self.dims, "custom")

    def time_reversed(self, t_final: float) -> "TimeDependentHamiltonian":
        """``-H(t_final - s)``: evolving under it for ``t_final`` undoes ``H``."""
        terms = []
        for term in self.terms:
            coeff = Reflected(term.coeff if term.coeff is not None else _one, t_final)
            terms.append(HamiltonianTerm(term.matrix, coeff, term.paired))
        return TimeDependentHamiltonian(terms, self.dims, "custom")


@dataclass(frozen=True)
class _One:
    def __call__(self, t):
        return 1.0

    bound = 1.0
    max_rate = 0.0


_one = _One()


def _ops(dims: HilbertDims):
    ops = build_elementary_ops(dims)
    return (
        ops.a.entries.real,
        ops.sigma_plus.entries.real,
        ops.sigma_z.entries.real,
        ops.number_op.entries.real,
    )


def _free_matrix(params: ModelParams, dims: HilbertDims) -> np.ndarray:
    _, _, sz, num = _ops(dims)
    return params.omega_0 / 2 * sz + params.omega_c * num


def _static(matrix, dims, label, params) -> TimeDependentHamiltonian:
    return TimeDependentHamiltonian((HamiltonianTerm(np.asarray(matrix, dtype=complex)),), dims, label, params)


def build_jc(params: ModelParams, dims: HilbertDims) -> TimeDependentHamiltonian:
    a, sp, _, _ = _ops(dims)
    coupling = params.g * sp @ a
    h = _free_matrix(params, dims) + coupling + coupling.T
    return _static(h, dims, "jc_static", params)


def build_cr(params: ModelParams, dims: HilbertDims) -> TimeDependentHamiltonian:
    """Counter-rotating coupling ``g (a^dag sigma_+ + a sigma_-)`` alone."""
    a, sp, _, _ = _ops(dims)
    coupling = params.g * sp @ a.T
    return _static(coupling + coupling.T, dims, "custom", params)


def build_rabi(params: ModelParams, dims: HilbertDims) -> TimeDependentHamiltonian:
    a, sp, _, _ = _ops(dims)
    x_qubit = sp + sp.T
    x_field = a + a.T
    h = _free_matrix(params, dims) + params.g * x_qubit @ x_field
    return _static(h, dims, "rabi_static", params)


def build_lab_frame(params: ModelParams, dims: HilbertDims) -> TimeDependentHamiltonian:
    """Modulated lab-frame Hamiltonian with ``omega(t) = omega + xi nu cos(nu t)``."""
    a, sp, sz, num = _ops(dims)
    interaction = params.g * (sp + sp.T) @ (a + a.T)
    terms = (
        HamiltonianTerm((sz / 2).astype(complex), ModulatedFrequency(params.omega_0, params.xi, params.nu)),
        HamiltonianTerm(num.astype(complex), ModulatedFrequency(params.omega_c, params.xi, params.nu)),
        HamiltonianTerm(interaction.astype(complex)),
    )
    return TimeDependentHamiltonian(terms, dims, "lab", params)


def _jc_interaction_term(params: ModelParams, dims: HilbertDims) -> HamiltonianTerm:
    a, sp, _, _ = _ops(dims)
    m = (params.g * sp @ a).astype(complex)
    if params.delta == 0.0:
        return HamiltonianTerm(m + m.T)
    return HamiltonianTerm(m, Rotating(params.delta), paired=True)


def _cr_remainder_term(params: ModelParams, dims: HilbertDims) -> HamiltonianTerm:
    a, sp, _, _ = _ops(dims)
    m = (params.g * sp @ a.T).astype(complex)
    phase = ModulatedPhase(params.omega_0 + params.omega_c, params.xi, params.nu)
    return HamiltonianTerm(m, phase, paired=True)


def build_jc_interaction(params: ModelParams, dims: HilbertDims) -> TimeDependentHamiltonian:
    """Interaction-picture JC target ``g (sigma_+ a e^{i delta t} + h.c.)``."""
    return TimeDependentHamiltonian((_jc_interaction_term(params, dims),), dims, "jc_interaction", params)


def build_cr_remainder(params: ModelParams, dims: HilbertDims) -> TimeDependentHamiltonian:
    """Counter-rotating remainder in the rotating frame, from its exact closed form."""
    return TimeDependentHamiltonian((_cr_remainder_term(params, dims),), dims, "cr_only", params)


def build_rotating_frame(params: ModelParams, dims: HilbertDims) -> TimeDependentHamiltonian:
    terms = (_jc_interaction_term(params, dims), _cr_remainder_term(params, dims))
    return TimeDependentHamiltonian(terms, dims, "rotating", params)


def frame_phases(params: ModelParams, dims: HilbertDims, t: float) -> np.ndarray:
    """Diagonal of the frame unitary ``exp{-i[phi_c(t) a^dag a + phi_a(t) sigma_z / 2]}``."""
    wobble = params.xi * math.sin(params.nu * t)
    phi_c = params.omega_c * t + wobble
    phi_a = params.omega_0 * t + wobble
    n = np.arange(dims.n_fock)
    phase_g = np.exp(-1j * (phi_c * n - phi_a / 2))
    phase_e = np.exp(-1j * (phi_c * n + phi_a / 2))
    return np.concatenate([phase_g, phase_e])


def frame_unitary(params: ModelParams, dims: HilbertDims, t: float) -> OperatorMatrix:
    return OperatorMatrix(np.diag(frame_phases(params, dims, t)), dims)


def to_rotating_frame(params: ModelParams, lab_amplitudes: np.ndarray, dims: HilbertDims, t: float) -> np.ndarray:
    """Map lab-frame amplitudes at time ``t`` into the rotating frame (``U(t)^dag psi``)."""
    return np.conj(frame_phases(params, dims, t)) * lab_amplitudes


def stack_coefficients(hamiltonians: Sequence[TimeDependentHamiltonian], t: float) -> np.ndarray:
    """Coefficient table of shape (n_terms, batch) for structurally identical Hamiltonians."""
    n_terms = len(hamiltonians[0].terms)
    out = np.empty((n_terms, len(hamiltonians)), dtype=complex)
    for b, h in enumerate(hamiltonians):
        for k, term in enumerate(h.terms):
            out[k, b] = 1.0 if term.coeff is None else term.coeff(t)
    return out
