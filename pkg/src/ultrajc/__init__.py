"""Frequency-modulated quantum Rabi model: counter-rotating suppression and the ultrastrong JC limit."""

__version__ = "0.1.0"

from .hamiltonians import (  # noqa: E402
    ModelParams,
    TimeDependentHamiltonian,
    build_cr,
    build_cr_remainder,
    build_jc,
    build_jc_interaction,
    build_lab_frame,
    build_rabi,
    build_rotating_frame,
    frame_unitary,
)
from .hilbert import (  # noqa: E402
    HilbertDims,
    OperatorMatrix,
    QuantumState,
    build_elementary_ops,
    inner_product,
    make_basis_state,
    make_coherent_state,
)
from .evolution import PropagationConfig, Trajectory, analytic_jc_evolution, propagate, propagate_pair  # noqa: E402
from .bessel import bessel_j  # noqa: E402
from .analysis import (  # noqa: E402
    check_validity,
    populations,
    rwa_fidelity,
    sideband_decompose,
    state_transfer_fidelity,
)
from .spectrum import ground_state, jc_levels, phase_diagram  # noqa: E402

__all__ = [
    "ModelParams", "TimeDependentHamiltonian", "build_cr", "build_cr_remainder", "build_jc",
    "build_jc_interaction", "build_lab_frame", "build_rabi", "build_rotating_frame", "frame_unitary",
    "HilbertDims", "OperatorMatrix", "QuantumState", "build_elementary_ops", "inner_product",
    "make_basis_state", "make_coherent_state", "PropagationConfig", "Trajectory", "analytic_jc_evolution",
    "propagate", "propagate_pair", "bessel_j", "check_validity", "populations", "rwa_fidelity",
    "sideband_decompose", "state_transfer_fidelity", "ground_state", "jc_levels", "phase_diagram",
]
