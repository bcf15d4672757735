import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultrajc.errors import ParameterError
from ultrajc.evolution import PropagationConfig, propagate
from ultrajc.hamiltonians import (
    ModelParams,
    build_cr,
    build_cr_remainder,
    build_jc,
    build_jc_interaction,
    build_lab_frame,
    build_rabi,
    build_rotating_frame,
    frame_phases,
    frame_unitary,
    to_rotating_frame,
)
from ultrajc.hilbert import HilbertDims, build_elementary_ops, excitation_number_op, make_basis_state

from .conftest import random_state

params_st = st.builds(
    ModelParams,
    omega_0=st.floats(0.5, 1.5),
    omega_c=st.floats(0.5, 1.5),
    g=st.floats(0.0, 1.0),
    xi=st.floats(0.0, 5.0),
    nu=st.floats(0.0, 6.0),
)


def test_params_validation():
    with pytest.raises(ParameterError):
        ModelParams(omega_0=-1.0)
    with pytest.raises(ParameterError):
        ModelParams(g=float("nan"))
    p = ModelParams(omega_0=1.2, omega_c=1.0)
    assert p.delta == pytest.approx(0.2)
    assert p.replace(xi=2.0).xi == 2.0


def test_rabi_is_jc_plus_cr(dims5):
    p = ModelParams(omega_0=1.1, omega_c=0.9, g=0.3)
    np.testing.assert_allclose(build_rabi(p, dims5).matrix(), build_jc(p, dims5).matrix() + build_cr(p, dims5).matrix(), atol=1e-14)


def test_rabi_matrix_elements(dims5):
    p = ModelParams(omega_0=1.0, omega_c=1.0, g=0.5)
    h = build_rabi(p, dims5).matrix()
    e0, g1 = dims5.encode("e", 0), dims5.encode("g", 1)
    g0, e1 = dims5.encode("g", 0), dims5.encode("e", 1)
    assert h[e0, g1] == pytest.approx(0.5)
    assert h[g0, e1] == pytest.approx(0.5)
    assert h[g0, g0] == pytest.approx(-0.5)
    assert h[e1, e1] == pytest.approx(1.5)
    # jc has no counter-rotating element
    assert build_jc(p, dims5).matrix()[g0, e1] == 0


def test_jc_block_diagonal(dims5):
    p = ModelParams(omega_0=1.3, omega_c=0.7, g=0.4)
    h = build_jc(p, dims5).matrix()
    n_exc = np.diag(excitation_number_op(dims5).entries).real
    rows, cols = np.nonzero(np.abs(h) > 0)
    assert np.all(n_exc[rows] == n_exc[cols])


@settings(max_examples=20, deadline=None)
@given(params_st)
def test_hermitian_at_all_times(p):
    dims = HilbertDims(4)
    ts = np.linspace(0, 50, 200)
    for builder in (build_lab_frame, build_rotating_frame, build_jc_interaction, build_cr_remainder):
        h = builder(p, dims)
        for t in ts[:: 20 if builder is not build_lab_frame else 1]:
            m = h.matrix(t)
            assert np.max(np.abs(m - m.conj().T)) < 1e-12


def test_hermiticity_200_times():
    p = ModelParams(g=0.5, xi=2.76, nu=5.0)
    h = build_rotating_frame(p, HilbertDims(20))
    for t in np.linspace(0, 20, 200):
        assert h(t).hermiticity_error() < 1e-12


def test_lab_frame_periodic():
    p = ModelParams(g=0.5, xi=2.76, nu=5.0)
    h = build_lab_frame(p, HilbertDims(6))
    period = 2 * math.pi / p.nu
    for t in (0.0, 0.37, 1.9):
        np.testing.assert_allclose(h.matrix(t), h.matrix(t + period), atol=1e-12)
    assert h.is_constant is False


def test_lab_frame_reduces_to_rabi_without_modulation(dims5):
    p = ModelParams(omega_0=1.1, g=0.3, xi=3.0, nu=0.0)
    np.testing.assert_allclose(build_lab_frame(p, dims5).matrix(2.0), build_rabi(p, dims5).matrix(), atol=1e-14)


def test_frame_unitary_examples(dims5):
    p = ModelParams(xi=2.0, nu=1.0)
    np.testing.assert_allclose(frame_unitary(p, dims5, 0.0).entries, np.eye(dims5.dim), atol=1e-15)
    # xi = 0: phase of |e, n> is exp(-i(omega_c n + omega_0 / 2) t)
    q = ModelParams(omega_0=1.3, omega_c=0.8)
    t = 0.7
    ph = frame_phases(q, dims5, t)
    assert ph[dims5.encode("e", 2)] == pytest.approx(np.exp(-1j * (0.8 * 2 + 0.65) * t))
    assert ph[dims5.encode("g", 3)] == pytest.approx(np.exp(-1j * (0.8 * 3 - 0.65) * t))
    u = frame_unitary(p, dims5, 1.234).entries
    np.testing.assert_allclose(u @ u.conj().T, np.eye(dims5.dim), atol=1e-14)


def test_rotating_frame_matches_direct_transform():
    """H_rot(t) = U^dag H_lab U - i U^dag dU/dt, built numerically."""
    dims = HilbertDims(5)
    p = ModelParams(omega_0=1.2, omega_c=0.9, g=0.4, xi=1.5, nu=2.0)
    ops = build_elementary_ops(dims)
    for t in (0.0, 0.3, 1.7):
        u = frame_unitary(p, dims, t).entries
        wobble = p.xi * p.nu * math.cos(p.nu * t)
        generator = (p.omega_c + wobble) * ops.number_op.entries + (p.omega_0 + wobble) / 2 * ops.sigma_z.entries
        h_rot = u.conj().T @ build_lab_frame(p, dims).matrix(t) @ u - generator
        np.testing.assert_allclose(build_rotating_frame(p, dims).matrix(t), h_rot, atol=1e-12)


def test_jc_interaction_conserves_excitations(dims5):
    n_exc = excitation_number_op(dims5).entries
    for delta in (0.0, 0.3):
        h = build_jc_interaction(ModelParams(omega_0=1 + delta, g=0.6), dims5)
        for t in (0.0, 1.1, 4.0):
            m = h.matrix(t)
            assert np.max(np.abs(m @ n_exc - n_exc @ m)) < 1e-14


def test_resonant_jc_interaction_is_static(dims5):
    assert build_jc_interaction(ModelParams(g=0.5), dims5).is_constant
    assert not build_jc_interaction(ModelParams(omega_0=1.1, g=0.5), dims5).is_constant


def test_time_reversed(dims5):
    p = ModelParams(g=0.5, xi=1.0, nu=2.0)
    h = build_rotating_frame(p, dims5)
    r = h.time_reversed(3.0)
    for t in (0.0, 0.5, 2.2):
        np.testing.assert_allclose(r.matrix(t), -h.matrix(3.0 - t), atol=1e-14)


def test_frame_consistency_random_draws():
    """Lab-frame evolution mapped into the rotating frame equals rotating-frame evolution."""
    rng = np.random.default_rng(7)
    dims = HilbertDims(6)
    for _ in range(20):
        p = ModelParams(
            omega_0=1.0,
            omega_c=float(rng.uniform(0.8, 1.2)),
            g=float(rng.uniform(0.05, 0.5)),
            xi=float(rng.uniform(0.0, 3.0)),
            nu=float(rng.uniform(0.0, 6.0)),
        )
        psi0 = random_state(rng, dims)
        t_end = float(rng.uniform(1.0, 3.0))
        h_lab, h_rot = build_lab_frame(p, dims), build_rotating_frame(p, dims)
        cfg = PropagationConfig.auto(p, dims, t_end, hamiltonians=[h_lab, h_rot], tolerance=1e-7)
        lab = propagate(h_lab, psi0, cfg).final.amplitudes
        rot = propagate(h_rot, psi0, cfg).final.amplitudes
        mapped = to_rotating_frame(p, lab, dims, cfg.t_end)
        assert abs(np.vdot(mapped, rot)) ** 2 >= 1 - 1e-6


def test_only_free_and_coupling_terms_act_on_vacuum():
    dims = HilbertDims(3)
    p = ModelParams(g=0.2)
    g0 = make_basis_state("g", 0, dims)
    out = build_rabi(p, dims).apply(0.0, g0.amplitudes)
    expected = np.zeros(dims.dim, complex)
    expected[dims.encode("g", 0)] = -0.5
    expected[dims.encode("e", 1)] = 0.2
    np.testing.assert_allclose(out, expected, atol=1e-15)
