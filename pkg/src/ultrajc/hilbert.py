"""Truncated qubit x Fock Hilbert space.

Basis vectors are ordered qubit-major: ``index = q * (N_c + 1) + n`` with
``q = 0`` for the ground state ``|g>`` and ``q = 1`` for ``|e>``.  Qubit
marginals are therefore contiguous slices of the amplitude vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import CutoffError, DimensionMismatchError

QubitLabel = Union[str, int]

_QUBIT_INDEX = {"g": 0, "e": 1, 0: 0, 1: 1}


def qubit_index(q: QubitLabel) -> int:
    try:
        return _QUBIT_INDEX[q]
    except (KeyError, TypeError):
        raise ValueError(f"qubit label must be 'g', 'e', 0 or 1, got {q!r}") from None


@dataclass(frozen=True)
class HilbertDims:
    """Dimensions of the truncated space with Fock cutoff ``fock_cutoff``."""

    fock_cutoff: int

    def __post_init__(self):
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise CutoffError(f"fock_cutoff must be an integer >= 1, got {self.fock_cutoff!r}")

    @property
    def n_fock(self) -> int:
        return self.fock_cutoff + 1

    @property
    def dim(self) -> int:
        return 2 * self.n_fock

    def encode(self, q: QubitLabel, n: int) -> int:
        if not 0 <= n <= self.fock_cutoff:
            raise CutoffError(f"Fock number {n} outside [0, {self.fock_cutoff}]")
        return qubit_index(q) * self.n_fock + int(n)

    def decode(self, index: int) -> tuple[int, int]:
        if not 0 <= index < self.dim:
            raise IndexError(f"basis index {index} outside [0, {self.dim})")
        return divmod(int(index), self.n_fock)

    def excitation_numbers(self) -> np.ndarray:
        """Eigenvalues of ``a^dag a + |e><e|`` along the basis."""
        n = np.arange(self.n_fock)
        return np.concatenate([n, n + 1]).astype(float)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class QuantumState:
    amplitudes: np.ndarray
    dims: HilbertDims

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.dims.dim,):
            raise DimensionMismatchError(
                f"amplitude vector of shape {amps.shape} does not match dimension {self.dims.dim}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def population(self, q: QubitLabel, n: int) -> float:
        return float(abs(self.amplitudes[self.dims.encode(q, n)]) ** 2)

    def qubit_population(self, q: QubitLabel) -> float:
        k = qubit_index(q) * self.dims.n_fock
        block = self.amplitudes[k : k + self.dims.n_fock]
        return float(np.vdot(block, block).real)


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    dims: HilbertDims
    hermitian: bool = field(default=False)

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.shape != (self.dims.dim, self.dims.dim):
            raise DimensionMismatchError(
                f"operator of shape {m.shape} does not match dimension {self.dims.dim}"
            )
        object.__setattr__(self, "entries", m)

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.dims, self.hermitian)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def apply(self, state: QuantumState) -> QuantumState:
        _check_dims(self.dims, state.dims)
        return QuantumState(self.entries @ state.amplitudes, state.dims)

    def expectation(self, state: QuantumState) -> complex:
        _check_dims(self.dims, state.dims)
        return complex(np.vdot(state.amplitudes, self.entries @ state.amplitudes))

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            _check_dims(self.dims, other.dims)
            return OperatorMatrix(self.entries @ other.entries, self.dims)
        if isinstance(other, QuantumState):
            return self.apply(other)
        return NotImplemented


def _check_dims(a: HilbertDims, b: HilbertDims) -> None:
    if a != b:
        raise DimensionMismatchError(f"dimension mismatch: {a} vs {b}")


def make_basis_state(q: QubitLabel, n: int, dims: HilbertDims) -> QuantumState:
    amps = np.zeros(dims.dim, dtype=complex)
    amps[dims.encode(q, n)] = 1.0
    return QuantumState(amps, dims)


def coherent_amplitudes(alpha: complex, n_fock: int) -> np.ndarray:
    """Unnormalised closed-form coherent amplitudes ``e^{-|a|^2/2} a^n / sqrt(n!)``."""
    out = np.empty(n_fock, dtype=complex)
    out[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, n_fock):
        out[n] = out[n - 1] * alpha / math.sqrt(n)
    return out


def _qubit_weights(q) -> np.ndarray:
    if isinstance(q, (str, int)) and not isinstance(q, bool):
        w = np.zeros(2, dtype=complex)
        w[qubit_index(q)] = 1.0
        return w
    w = np.asarray(q, dtype=complex)
    if w.shape != (2,):
        raise ValueError("qubit superposition weights must be a pair (c_g, c_e)")
    norm = np.linalg.norm(w)
    if norm == 0:
        raise ValueError("qubit superposition weights are all zero")
    return w / norm


def make_coherent_state(q, alpha: complex, dims: HilbertDims) -> QuantumState:
    """Product state of a qubit part and a coherent field ``|alpha>``.

    ``q`` is a qubit label or a pair of weights ``(c_g, c_e)``, which is
    normalised.  The Fock part is renormalised on the truncated space; the
    cutoff must satisfy ``|alpha|^2 <= N_c / 4``.
    """
    mean_n = abs(alpha) ** 2
    if mean_n > dims.fock_cutoff / 4:
        need = max(1, math.ceil(4 * mean_n))
        raise CutoffError(
            f"|alpha|^2 = {mean_n:.4g} is too large for fock_cutoff={dims.fock_cutoff}; "
            f"use fock_cutoff >= {need}"
        )
    fock = coherent_amplitudes(alpha, dims.n_fock)
    fock = fock / np.linalg.norm(fock)
    return QuantumState(np.kron(_qubit_weights(q), fock), dims)


def superposition(components: Sequence[tuple[complex, QuantumState]]) -> QuantumState:
    """Normalised linear combination ``sum c_k |psi_k>``."""
    dims = components[0][1].dims
    amps = np.zeros(dims.dim, dtype=complex)
    for c, s in components:
        _check_dims(dims, s.dims)
        amps = amps + c * s.amplitudes
    return QuantumState(amps / np.linalg.norm(amps), dims)


def inner_product(psi: QuantumState, phi: QuantumState) -> complex:
    """``<psi|phi>``, conjugating the first argument."""
    _check_dims(psi.dims, phi.dims)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def state_fidelity(psi: QuantumState, phi: QuantumState) -> float:
    return abs(inner_product(psi, phi)) ** 2


@dataclass(frozen=True)
class ElementaryOps:
    a: OperatorMatrix
    a_dag: OperatorMatrix
    sigma_z: OperatorMatrix
    sigma_plus: OperatorMatrix
    sigma_minus: OperatorMatrix
    number_op: OperatorMatrix

    def as_dict(self) -> dict[str, OperatorMatrix]:
        return {
            "a": self.a,
            "a_dag": self.a_dag,
            "sigma_z": self.sigma_z,
            "sigma_plus": self.sigma_plus,
            "sigma_minus": self.sigma_minus,
            "number_op": self.number_op,
        }


def build_elementary_ops(dims: HilbertDims) -> ElementaryOps:
    nf = dims.n_fock
    a_f = np.diag(np.sqrt(np.arange(1, nf, dtype=float)), 1)
    eye_f = np.eye(nf)
    eye_q = np.eye(2)
    sp_q = np.array([[0.0, 0.0], [1.0, 0.0]])  # |e><g|
    sz_q = np.diag([-1.0, 1.0])

    a = np.kron(eye_q, a_f)
    sp = np.kron(sp_q, eye_f)
    return ElementaryOps(
        a=OperatorMatrix(a, dims),
        a_dag=OperatorMatrix(a.T, dims),
        sigma_z=OperatorMatrix(np.kron(sz_q, eye_f), dims, hermitian=True),
        sigma_plus=OperatorMatrix(sp, dims),
        sigma_minus=OperatorMatrix(sp.T, dims),
        number_op=OperatorMatrix(np.kron(eye_q, a_f.T @ a_f), dims, hermitian=True),
    )


def excitation_number_op(dims: HilbertDims) -> OperatorMatrix:
    return OperatorMatrix(np.diag(dims.excitation_numbers()), dims, hermitian=True)
