import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultrajc.errors import CutoffError, DimensionMismatchError
from ultrajc.hilbert import (
    HilbertDims,
    build_elementary_ops,
    coherent_amplitudes,
    excitation_number_op,
    inner_product,
    make_basis_state,
    make_coherent_state,
)

from .conftest import random_state


def test_dimension_and_index_round_trip():
    d = HilbertDims(7)
    assert d.dim == 16
    for q in (0, 1):
        for n in range(8):
            assert d.decode(d.encode(q, n)) == (q, n)


@given(st.integers(min_value=1, max_value=60))
def test_dimension_formula(nc):
    d = HilbertDims(nc)
    assert d.dim == 2 * (nc + 1)
    assert sorted(d.encode(q, n) for q in "ge" for n in range(nc + 1)) == list(range(d.dim))


def test_invalid_cutoff():
    with pytest.raises(CutoffError):
        HilbertDims(0)


def test_basis_states(dims5):
    s = make_basis_state("g", 0, dims5)
    assert s.amplitudes[0] == 1 and s.norm_squared == 1
    s = make_basis_state("e", 1, dims5)
    assert np.flatnonzero(s.amplitudes).tolist() == [7]
    with pytest.raises(CutoffError):
        make_basis_state("g", 6, dims5)


def test_coherent_vacuum_limit(dims5):
    s = make_coherent_state("g", 0.0, dims5)
    np.testing.assert_array_equal(s.amplitudes, make_basis_state("g", 0, dims5).amplitudes)


def test_coherent_amplitude_closed_form():
    raw = coherent_amplitudes(0.1, 11)
    assert raw[0] == pytest.approx(math.exp(-0.005), abs=1e-15)
    assert raw[0] == pytest.approx(0.995012479, abs=1e-9)
    for n in range(11):
        assert raw[n] == pytest.approx(math.exp(-0.005) * 0.1**n / math.sqrt(math.factorial(n)), rel=1e-14)


def test_plus_coherent_normalised():
    s = make_coherent_state((1, 1), 0.1, HilbertDims(10))
    assert abs(s.norm_squared - 1) < 1e-12
    assert s.qubit_population("e") == pytest.approx(0.5, abs=1e-14)


def test_coherent_cutoff_guard():
    with pytest.raises(CutoffError, match="fock_cutoff >= 16"):
        make_coherent_state("g", 2.0, HilbertDims(10))


def test_coherent_cutoff_convergence():
    a = make_coherent_state((1, 1), 0.1, HilbertDims(5))
    b = make_coherent_state((1, 1), 0.1, HilbertDims(10))
    # compare Fock amplitudes for n <= 5 in each qubit block
    for q in "ge":
        for n in range(6):
            assert abs(a.amplitudes[a.dims.encode(q, n)] - b.amplitudes[b.dims.encode(q, n)]) < 1e-10


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=-1.5, max_value=1.5),
    st.floats(min_value=-1.5, max_value=1.5),
    st.integers(min_value=18, max_value=30),
)
def test_coherent_norm_property(re, im, nc):
    # |alpha|^2 <= 4.5 <= N_c / 4 keeps the state inside the cutoff guard
    s = make_coherent_state((1, 1j), complex(re, im), HilbertDims(nc))
    assert abs(s.norm_squared - 1) < 1e-9


def test_inner_product_basics(dims5, rng):
    g0, e0 = make_basis_state("g", 0, dims5), make_basis_state("e", 0, dims5)
    assert inner_product(g0, g0) == 1
    assert inner_product(g0, e0) == 0
    for _ in range(10):
        psi, phi = random_state(rng, dims5), random_state(rng, dims5)
        assert inner_product(psi, phi) == pytest.approx(np.conj(inner_product(phi, psi)), abs=1e-15)
        assert abs(inner_product(psi, phi)) <= 1 + 1e-9


def test_inner_product_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        inner_product(make_basis_state("g", 0, HilbertDims(3)), make_basis_state("g", 0, HilbertDims(4)))


@pytest.mark.parametrize("nc", [1, 5, 20])
def test_elementary_operators(nc):
    d = HilbertDims(nc)
    ops = build_elementary_ops(d)
    a, ad = ops.a.entries, ops.a_dag.entries
    np.testing.assert_allclose(ad, a.conj().T, atol=1e-14)
    np.testing.assert_allclose(ops.sigma_plus.entries, ops.sigma_minus.entries.conj().T, atol=1e-14)
    comm = a @ ad - ad @ a
    for q in "ge":
        for n in range(nc):
            i = d.encode(q, n)
            e = np.zeros(d.dim)
            e[i] = 1
            np.testing.assert_allclose(comm @ e, e, atol=1e-14)
    # a|n> = sqrt(n)|n-1>
    for n in range(1, nc + 1):
        v = a @ make_basis_state("g", n, d).amplitudes
        np.testing.assert_allclose(v, math.sqrt(n) * make_basis_state("g", n - 1, d).amplitudes, atol=1e-14)
    sp_g = ops.sigma_plus.apply(make_basis_state("g", 0, d))
    np.testing.assert_array_equal(sp_g.amplitudes, make_basis_state("e", 0, d).amplitudes)


def test_sigma_z_and_number(dims5):
    ops = build_elementary_ops(dims5)
    for n in range(6):
        e_n, g_n = make_basis_state("e", n, dims5), make_basis_state("g", n, dims5)
        np.testing.assert_array_equal(ops.sigma_z.apply(e_n).amplitudes, e_n.amplitudes)
        np.testing.assert_array_equal(ops.sigma_z.apply(g_n).amplitudes, -g_n.amplitudes)
    g3 = make_basis_state("g", 3, dims5)
    np.testing.assert_allclose(ops.number_op.apply(g3).amplitudes, 3 * g3.amplitudes)


def test_excitation_number_operator(dims5):
    ops = build_elementary_ops(dims5)
    n_exc = ops.number_op.entries + (ops.sigma_z.entries + np.eye(dims5.dim)) / 2
    np.testing.assert_allclose(excitation_number_op(dims5).entries, n_exc, atol=1e-15)
