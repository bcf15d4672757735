import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultrajc.analysis import (
    check_validity,
    classify_regime,
    fidelity,
    jacobi_anger_sum,
    populations,
    rwa_fidelity,
    rwa_fidelity_batch,
    sideband_decompose,
    state_transfer_fidelity,
    transfer_target_state,
    transfer_time,
)
from ultrajc.bessel import bessel_j
from ultrajc.errors import RegimeError
from ultrajc.evolution import PropagationConfig, propagate
from ultrajc.hamiltonians import ModelParams, build_jc_interaction
from ultrajc.hilbert import HilbertDims, make_basis_state, superposition

from .conftest import random_state


def brute_force_n0(params, window=200):
    return min(range(-window, window + 1), key=lambda n: abs(params.sideband_frequency(n)))


def test_sidebands_high_frequency(fig1_params):
    sb = sideband_decompose(fig1_params)
    assert sb.n0 == 0 and sb.tie is None
    assert sb.delta_n0 == pytest.approx(2.0)
    assert sb.g_c == pytest.approx(0.5 * bessel_j(0, 5.52))
    assert abs(sb.g_c) < 2.5e-4
    for n, delta_n, _ in sb.sideband_table:
        assert delta_n == 2.0 + 5.0 * n
    assert abs(sb.delta_n0) == min(abs(r[1]) for r in sb.sideband_table)


def test_sidebands_nu_3_6():
    p = ModelParams(g=0.5, xi=2.76, nu=3.6)
    sb = sideband_decompose(p)
    assert sb.n0 == -1 == brute_force_n0(p)
    assert sb.delta_n0 == pytest.approx(-1.6)
    assert sb.g_c == pytest.approx(0.5 * bessel_j(-1, 5.52), abs=1e-14)


def test_sideband_tie_prefers_larger_bessel():
    p = ModelParams(g=0.5, xi=2.76, nu=4.0)
    sb = sideband_decompose(p)
    assert {sb.n0, sb.tie} == {0, -1}
    # |J_1(5.52)| is about 0.34, |J_0(5.52)| is almost zero
    assert sb.n0 == -1
    assert abs(sb.g_c) > abs(sb.row(sb.tie)[2])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 8.0), st.floats(0.0, 40.0), st.floats(0.5, 1.5))
def test_sideband_minimum_is_exhaustive(nu, xi, omega_c):
    p = ModelParams(omega_c=omega_c, g=0.5, xi=xi, nu=nu)
    sb = sideband_decompose(p)
    assert abs(sb.delta_n0) == pytest.approx(abs(p.sideband_frequency(brute_force_n0(p))), abs=1e-12)


def test_no_sidebands_without_modulation():
    with pytest.raises(RegimeError):
        sideband_decompose(ModelParams(xi=1.0, nu=0.0))


@pytest.mark.parametrize("xi", [0.0, 2.76, 10.0, 40.0])
def test_jacobi_anger_resummation(xi):
    nu = 0.7
    for t in np.linspace(0, 20, 41):
        assert abs(jacobi_anger_sum(xi, nu, t) - np.exp(2j * xi * math.sin(nu * t))) < 1e-10


def test_regime_classification():
    assert classify_regime(ModelParams(xi=2.76, nu=5.0)) == "high"
    assert classify_regime(ModelParams(xi=40.0, nu=0.1)) == "low"
    assert classify_regime(ModelParams(xi=40.0, nu=1.0)) == "neither"
    assert classify_regime(ModelParams(xi=0.0, nu=0.1)) == "neither"
    assert classify_regime(ModelParams()) == "neither"


def test_validity_high_frequency_passes(fig1_params):
    report = check_validity(fig1_params, n_exc=2)
    assert report.regime == "high" and report.valid
    assert report.by_name("high:nu_exceeds_sum").passed
    assert report.by_name("high:cr_coupling_vs_detuning").ratio > 1e3


def test_validity_low_frequency_passes():
    report = check_validity(ModelParams(g=0.5, xi=40.0, nu=0.1), n_exc=2)
    assert report.regime == "low" and report.valid
    cond = report.by_name("low:cr_phase_rate")
    assert cond.left == pytest.approx(10.0)
    assert cond.right == pytest.approx(0.5 * math.sqrt(2))
    assert cond.status == "pass"


def test_validity_unmodulated_fails():
    report = check_validity(ModelParams(g=0.5), n_exc=2)
    assert report.regime == "neither" and not report.valid
    assert not report.by_name("high:nu_exceeds_sum").passed
    assert not report.by_name("low:modulation_present").passed
    assert not report.by_name("low:slow_modulation").passed


def test_warn_band_and_advisory():
    report = check_validity(ModelParams(g=0.5, xi=2.76, nu=3.6), n_exc=2)
    assert report.regime == "high"
    # nu / |Delta_{-1}| = 3.6 / 1.6 is below the warning band but only advisory
    assert report.by_name("high:nu_vs_dominant_detuning").status == "fail"
    assert not report.by_name("high:nu_vs_dominant_detuning").required
    statuses = {c.status for c in report.conditions}
    assert statuses <= {"pass", "warn", "fail"}
    assert not report.valid


def test_validity_detuned_uses_jc_ratio():
    report = check_validity(ModelParams(omega_0=1.0, omega_c=0.9, g=0.5, xi=2.76, nu=5.0), n_exc=2)
    cond = report.by_name("high:jc_vs_cr_ratio")
    assert cond.left == pytest.approx(0.5 / 0.1)
    assert math.isfinite(cond.ratio)


def test_populations_single_excitation(dims5):
    p = ModelParams(g=0.5)
    h = build_jc_interaction(p, dims5)
    cfg = PropagationConfig.auto(p, dims5, 2 * math.pi / p.g, hamiltonians=[h])
    traj = propagate(h, make_basis_state("e", 0, dims5), cfg, keep_states=True)
    pops = populations(traj, [("e", 0), ("g", 1), ("g", 0), "e"])
    np.testing.assert_allclose(pops["P[e,0]"] + pops["P[g,1]"], 1.0, atol=1e-8)
    np.testing.assert_allclose(pops["P[g,0]"], 0.0, atol=1e-15)
    np.testing.assert_allclose(pops["P[e]"], pops["P[e,0]"], atol=1e-15)
    # first return of P[e,0] to 1 at the Rabi period pi/g
    window = (traj.times > 0.5 * math.pi / p.g) & (traj.times < 1.5 * math.pi / p.g)
    t_return = traj.times[window][np.argmax(pops["P[e,0]"][window])]
    assert abs(t_return - math.pi / p.g) <= 2 * cfg.step


def test_populations_ground_state(dims5):
    p = ModelParams(g=0.5)
    h = build_jc_interaction(p, dims5)
    cfg = PropagationConfig.auto(p, dims5, 1.0, hamiltonians=[h])
    traj = propagate(h, make_basis_state("g", 0, dims5), cfg, keep_states=True)
    pops = populations(traj, [("g", 0), "e"])
    np.testing.assert_allclose(pops["P[g,0]"], 1.0, atol=1e-12)
    np.testing.assert_allclose(pops["P[e]"], 0.0, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fidelity_symmetric_and_bounded(seed):
    rng = np.random.default_rng(seed)
    dims = HilbertDims(4)
    a, b = random_state(rng, dims), random_state(rng, dims)
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-15)
    assert 0.0 <= fidelity(a, b) <= 1 + 1e-9


def test_transfer_time():
    assert transfer_time(ModelParams(g=0.5)) == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        transfer_time(ModelParams(g=0.0))


def test_transfer_target_resonant():
    dims = HilbertDims(5)
    target = transfer_target_state(ModelParams(g=0.5), dims)
    expected = superposition([(1.0, make_basis_state("g", 0, dims)), (-1j, make_basis_state("g", 1, dims))])
    assert fidelity(target, expected) == pytest.approx(1.0, abs=1e-14)
    # the relative phase matters, not only the populations
    np.testing.assert_allclose(target.amplitudes, expected.amplitudes, atol=1e-14)


def test_state_transfer_with_target_generator_is_perfect():
    dims = HilbertDims(10)
    p = ModelParams(g=0.5)
    assert state_transfer_fidelity(p, dims=dims, hamiltonian=build_jc_interaction(p, dims)) == pytest.approx(1, abs=1e-8)


def test_state_transfer_modulation_helps():
    dims = HilbertDims(10)
    modulated = state_transfer_fidelity(ModelParams(g=0.5, xi=2.76, nu=5.0), dims=dims)
    bare = state_transfer_fidelity(ModelParams(g=0.5), dims=dims)
    assert modulated > 0.99
    assert bare < modulated - 0.1


def test_rwa_fidelity_batch_matches_single():
    dims = HilbertDims(8)
    ps = [ModelParams(g=0.5, xi=2.76, nu=v) for v in (0.0, 4.0, 5.0)] + [ModelParams(g=0.3, xi=1.0, nu=5.0)]
    batch = rwa_fidelity_batch(ps, dims=dims)
    single = [rwa_fidelity(p, dims=dims) for p in ps]
    np.testing.assert_allclose(batch, single, atol=1e-7)
    assert batch[2] > batch[1] > batch[0]
