import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_enclose import (
    FormMatrices,
    InvalidArgumentError,
    Potential,
    UnsupportedDegreeError,
    assemble,
    cholesky,
    eig_gsym,
    make_mesh,
    shift,
)
from spectral_enclose.assembly import BANDWIDTH, element_matrices, read_matrix, write_matrix


def sympy_element(V, a, h):
    """Exact local matrices on [a, a+h] from symbolic integration."""
    x = sp.symbols("x")
    s = (x - a) / h
    H = [1 - 3 * s**2 + 2 * s**3, h * (s - 2 * s**2 + s**3), 3 * s**2 - 2 * s**3, h * (s**3 - s**2)]
    Vx = V(x)
    K = [np.zeros((4, 4)) for _ in range(3)]
    for i in range(4):
        for j in range(4):
            ui, uj = H[i], H[j]
            K[0][i, j] = sp.integrate(ui * uj, (x, a, a + h))
            K[1][i, j] = sp.integrate(sp.diff(ui, x) * sp.diff(uj, x) + Vx * ui * uj, (x, a, a + h))
            Aui = -sp.diff(ui, x, 2) + Vx * ui
            Auj = -sp.diff(uj, x, 2) + Vx * uj
            K[2][i, j] = sp.integrate(sp.expand(Aui * Auj), (x, a, a + h))
    return K


class TestPotential:
    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=8), st.floats(-3, 3))
    def test_horner_matches_power_sum(self, coeffs, x):
        V = Potential(tuple(coeffs))
        direct = sum(c * x**k for k, c in enumerate(coeffs))
        scale = sum(abs(c) * abs(x) ** k for k, c in enumerate(coeffs))
        assert abs(V(x) - direct) <= 1e-13 * max(scale, 1e-300) + 1e-300

    def test_degree_strips_trailing_zeros(self):
        assert Potential((1.0, 2.0, 0.0, 0.0)).degree == 1
        assert Potential(()).degree == 0

    def test_named(self):
        assert Potential.from_spec("harmonic").coefficients == (0.0, 0.0, 1.0)
        assert Potential.from_spec("anharmonic").degree == 4
        assert Potential.from_spec("0,0,1").coefficients == (0.0, 0.0, 1.0)
        assert Potential.from_spec([0, 1]).degree == 1
        with pytest.raises(InvalidArgumentError):
            Potential.from_spec("quartic-ish")


class TestElementIntegrals:
    def test_single_element_closed_forms(self):
        h = 0.3
        mesh = make_mesh(0.3, 2)
        K0, K1, K2 = element_matrices(Potential((0.0,)), mesh)
        assert K0[0, 0, 0] == pytest.approx(13 * h / 35, rel=1e-14)
        assert K2[0, 0, 0] == pytest.approx(12 / h**3, rel=1e-14)

    @pytest.mark.parametrize("coeffs", [(0, 0, 1), (0, 0, 0, 0, 1), (2, -1, 0.5, 0.25)])
    def test_against_symbolic_integration(self, coeffs):
        mesh = make_mesh(1, 8)  # element 1 spans [-0.75, -0.5]
        pot = Potential(coeffs)
        rc = [sp.Rational(c).limit_denominator(1000) for c in coeffs]
        K = sympy_element(lambda x: sum(c * x**k for k, c in enumerate(rc)), sp.Rational(-3, 4), sp.Rational(1, 4))
        ours = element_matrices(pot, mesh)
        for mine, exact in zip(ours, K):
            np.testing.assert_allclose(mine[1], exact, rtol=1e-12, atol=1e-12 * np.abs(exact).max())

    def test_degree_overflow(self):
        with pytest.raises(UnsupportedDegreeError):
            assemble(Potential((0.0,) * 13 + (1.0,)), make_mesh(1, 4))


@pytest.mark.parametrize("slopes", [True, False])
def test_matrix_structure(slopes):
    forms = assemble("anharmonic", make_mesh(3.0, 30, boundary_slopes=slopes))
    N = forms.N
    j, k = np.indices((N, N))
    for M in (forms.A0, forms.A1, forms.A2):
        np.testing.assert_array_equal(M, M.T)
        assert np.all(M[np.abs(j - k) > BANDWIDTH] == 0.0)
    cholesky(forms.A0)
    cholesky(forms.A2)


def test_dirichlet_laplacian():
    L = math.pi / 2
    forms = assemble("free", make_mesh(L, 16))
    vals = eig_gsym(forms.A1, forms.A0, vectors=False).values[:4]
    exact = np.array([(k * math.pi / (2 * L)) ** 2 for k in range(1, 5)])
    assert np.all(vals >= exact)
    assert vals[0] - 1.0 < 1e-8


def test_galerkin_above_harmonic_spectrum(harmonic200):
    vals = eig_gsym(harmonic200.A1, harmonic200.A0, vectors=False).values[:10]
    assert np.all(vals > 2 * np.arange(1, 11) - 1)


class TestShift:
    def test_zero_shift(self, harmonic200):
        s = shift(harmonic200, 0.0)
        np.testing.assert_array_equal(s.A1t, harmonic200.A1)
        np.testing.assert_array_equal(s.A2t, harmonic200.A2)

    def test_operator_equals_shift(self):
        eye = np.eye(3)
        s = shift(FormMatrices(eye, eye, eye), 1.0)
        assert np.all(s.A1t == 0) and np.all(s.A2t == 0)

    @given(st.integers(0, 2**32 - 1), st.floats(-50, 50))
    def test_quadratic_identity(self, seed, t):
        rng = np.random.default_rng(seed)
        A = [rng.standard_normal((6, 6)) for _ in range(3)]
        A = [a + a.T for a in A]
        s = shift(FormMatrices(*A), t)
        u = rng.standard_normal(6)
        q0, q1, q2 = (u @ a @ u for a in A)
        rhs = q2 - 2 * t * q1 + t * t * q0
        scale = abs(q2) + 2 * abs(t * q1) + t * t * abs(q0)
        assert abs(u @ s.A2t @ u - rhs) <= 1e-12 * scale
        assert abs(u @ s.A1t @ u - (q1 - t * q0)) <= 1e-12 * (abs(q1) + abs(t * q0))

    def test_band_preserved(self, harmonic200):
        s = shift(harmonic200, 13.7)
        N = harmonic200.N
        j, k = np.indices((N, N))
        assert np.all(s.A1t[np.abs(j - k) > BANDWIDTH] == 0)
        assert np.all(s.A2t[np.abs(j - k) > BANDWIDTH] == 0)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-60, 60), st.sampled_from(["harmonic", "anharmonic"]))
def test_cauchy_schwarz(seed, t, pot):
    forms = _small_forms(pot)
    u = np.random.default_rng(seed).standard_normal(forms.N)
    s = shift(forms, t)
    a0, a1, a2 = u @ forms.A0 @ u, u @ s.A1t @ u, u @ s.A2t @ u
    assert a1 * a1 <= a0 * a2 + 1e-10 * a0 * a2


_CACHE = {}


def _small_forms(pot):
    if pot not in _CACHE:
        _CACHE[pot] = assemble(pot, make_mesh(4.0, 24))
    return _CACHE[pot]


def test_matrix_dump_roundtrip(tmp_path):
    forms = assemble("harmonic", make_mesh(2.0, 5))
    path = tmp_path / "A2.mtx"
    write_matrix(path, forms.A2)
    lines = path.read_text().splitlines()
    N = forms.N
    nnz = int(np.count_nonzero(forms.A2))
    assert lines[0] == f"{N} {N} {nnz}"
    rows = [tuple(int(v) for v in ln.split()[:2]) for ln in lines[1:]]
    assert rows == sorted(rows)
    np.testing.assert_array_equal(read_matrix(path), forms.A2)
