import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from canonoid.jacobi import (
    CloseRootsWarning,
    CoefficientSequence,
    JacobiOperator,
    MomentSequence,
    RecursionOverflowError,
    closed_form_eps0,
    coefficient_sequence,
    decay_exponent,
    extension_spectrum,
    hankel_matrix,
    hankel_psd_check,
    interlaces,
    limit_circle_diagnostics,
    offdiag,
    orthogonality_function,
    recurrence,
    truncated_spectrum,
)


@pytest.fixture(scope="module")
def spec0():
    return extension_spectrum(0.0, (-10, 10), n_max=2000, tol=1e-10)


@pytest.fixture(scope="module")
def spec1():
    return extension_spectrum(1.0, (-10, 10), n_max=2000, tol=1e-10)


# -------------------------------------------------------------- recursion


def test_recursion_examples():
    f = coefficient_sequence(0.0, 10, 1.0).values
    assert f[2] == pytest.approx(-(0.5**1.5), rel=1e-15)
    assert f[4] == pytest.approx(0.375**1.5, rel=1e-15)
    assert np.all(f[1::2] == 0)
    g = coefficient_sequence(1.0, 10, 1.0).values
    assert g[1] == 1.0
    assert abs(g[2]) < 1e-15
    assert g[3] == pytest.approx(-((2 / 3) ** 1.5), rel=1e-14)


def test_recursion_preconditions():
    with pytest.raises(ValueError):
        coefficient_sequence(0.0, 1, 1.0)
    with pytest.raises(ValueError):
        coefficient_sequence(0.0, 10, 0.0)


def test_overflow_guard():
    with pytest.raises(RecursionOverflowError):
        coefficient_sequence(1e200, 10)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-20, max_value=20), st.floats(min_value=0.1, max_value=10))
def test_sequence_invariants(eps, f0):
    seq = coefficient_sequence(eps, 600, f0)
    assert seq.values[1] == pytest.approx(eps * f0, rel=1e-15, abs=1e-300)
    assert np.max(seq.recursion_residuals()) < 1e-12
    # l2 membership: partial norms flatten out
    pn = seq.partial_norms()
    assert np.all(np.isfinite(pn))
    assert pn[-1] - pn[300] < pn[300]


def test_recursion_is_linear_in_seed():
    a = coefficient_sequence(1.7, 200, 1.0).values
    b = coefficient_sequence(1.7, 200, -3.5).values
    assert np.allclose(b, -3.5 * a, rtol=1e-13, atol=0)


def test_vectorized_recurrence_matches_scalar():
    eps = np.array([-1.0, 0.3, 2.2])
    f = recurrence(eps, 300)
    for j, e in enumerate(eps):
        assert np.array_equal(f[:, j], coefficient_sequence(e, 300).values)


def test_closed_form_examples():
    c = closed_form_eps0(10, 1.0).values
    assert c[0] == 1.0
    assert c[2] == pytest.approx(-(2**-1.5), rel=1e-15)
    assert np.all(c[1::2] == 0)
    with pytest.raises(ValueError):
        closed_form_eps0(1)


def test_closed_form_matches_recursion():
    n_max = 4000
    c = closed_form_eps0(n_max, 1.0).values
    r = coefficient_sequence(0.0, n_max, 1.0).values
    even = slice(0, 2001, 2)
    assert np.max(np.abs(r[even] - c[even]) / np.abs(c[even])) < 1e-10


def test_closed_form_extended_precision():
    # high-precision product as an independent oracle for the log-space formula
    mpmath.mp.dps = 40
    c = closed_form_eps0(1000, 1.0).values
    ratio = mpmath.mpf(1)
    for k in range(1, 501):
        ratio *= mpmath.mpf(2 * k - 1) / (2 * k)
        if k in (1, 7, 100, 500):
            ref = (-1) ** k * ratio**1.5
            assert c[2 * k] == pytest.approx(float(ref), rel=1e-13)
    mpmath.mp.dps = 15


def test_matrix_consistency():
    seq = coefficient_sequence(1.3, 500)
    Af = JacobiOperator().apply(seq.values)
    f = seq.values
    rel = np.abs(Af[1:] - 1.3 * f[1:-1]) / np.maximum(np.abs(Af[1:]), 1e-300)
    absd = np.abs(Af[1:] - 1.3 * f[1:-1])
    assert np.all((absd < 1e-12) | (rel < 1e-12))
    assert Af[0] == pytest.approx(1.3 * f[0], rel=1e-15)


def test_l2_increment_decay():
    # increments over [n, 2n] shrink like n^{-1/2}
    for eps in (0.0, 1.0, -3.7):
        pn = coefficient_sequence(eps, 8000).partial_norms()
        inc = np.array([pn[2 * n] - pn[n] for n in (500, 1000, 2000, 4000)])
        ratios = inc[1:] / inc[:-1]
        assert np.all(np.abs(ratios - 2**-0.5) < 0.05)


# ------------------------------------------------------------------ decay


def test_decay_eps0():
    seq = coefficient_sequence(0.0, 4000)
    assert abs(decay_exponent(seq, (200, 2000)) + 1.5) < 0.05


def test_decay_eps2_both_parities():
    seq = coefficient_sequence(2.0, 4000)
    assert abs(decay_exponent(seq, (200, 2000), parity=0) + 1.5) < 0.05
    # odd terms share the n^{-3/2} law but reach it later
    odd = [decay_exponent(seq, (lo, 10 * lo), parity=1) for lo in (50, 150)]
    assert abs(odd[1] + 1.5) < abs(odd[0] + 1.5)


def test_decay_synthetic_power_law():
    n = np.arange(0, 1001)
    vals = np.zeros(2001)
    vals[2 * n[1:]] = n[1:] ** -0.75
    vals[0] = 1
    seq = CoefficientSequence(0.0, 1.0, vals)
    assert decay_exponent(seq, (10, 1000)) == pytest.approx(-1.5, abs=1e-12)


def test_decay_window_errors():
    seq = coefficient_sequence(0.0, 400)
    with pytest.raises(ValueError):
        decay_exponent(seq, (10, 20))
    with pytest.raises(ValueError):
        decay_exponent(seq, (0, 100))
    with pytest.raises(ValueError):
        decay_exponent(seq, (10, 300))
    with pytest.raises(ValueError):
        decay_exponent(seq, (10, 100), parity=1)


# ----------------------------------------------------------- truncations


def test_truncated_examples():
    assert np.allclose(truncated_spectrum(2), [-1, 1], atol=1e-15)
    assert np.allclose(truncated_spectrum(3), [-3, 0, 3], atol=1e-14)
    with pytest.raises(ValueError):
        truncated_spectrum(1)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=120))
def test_truncations_interlace_and_are_symmetric(N):
    inner, outer = truncated_spectrum(N), truncated_spectrum(N + 1)
    scale = np.max(np.abs(outer))
    assert interlaces(inner, outer, slack=1e-12 * scale)
    assert np.max(np.abs(inner + inner[::-1])) < 1e-11 * scale
    ref = np.linalg.eigvalsh(JacobiOperator().section(N))
    assert np.allclose(inner, ref, atol=1e-11 * scale)


def test_interlaces_detects_violation():
    assert not interlaces(np.array([0.0, 5.0]), np.array([-1.0, 1.0, 2.0]))
    with pytest.raises(ValueError):
        interlaces(np.zeros(3), np.zeros(3))


def test_jacobi_operator_custom_rule():
    op = JacobiOperator(lambda n: np.ones_like(n, dtype=float))
    ev = truncated_spectrum(5, op)
    ref = 2 * np.cos(np.arange(1, 6) * np.pi / 6)
    assert np.allclose(np.sort(ev), np.sort(ref))


def test_offdiag_log_concave():
    b = offdiag(np.arange(0, 3))
    assert b[0] * b[2] == pytest.approx(3**1.5)
    assert b[1] ** 2 == pytest.approx(8.0)


def test_limit_circle_diagnostics():
    d = limit_circle_diagnostics(10**6)
    z = d["zeta_3_2"]
    assert d["partial_sum"] < z < d["upper_bound"]
    assert z - d["partial_sum"] < d["tail_bound"] <= 2 / math.sqrt(10**6) + 1e-15
    assert d["log_concave"]
    assert d["max_concavity_ratio"] < 1
    with pytest.raises(ValueError):
        limit_circle_diagnostics(50)


# ------------------------------------------------------ orthogonality / S


def test_s_self_positive():
    for e in (-2.0, 0.0, 0.7, 5.0):
        v = orthogonality_function(e, e, 1000)
        assert v.partial_sum > 0 and v.value > 0


def test_s_convergence_in_depth():
    a = orthogonality_function(0.0, 0.0, 2000)
    b = orthogonality_function(0.0, 0.0, 4000)
    assert abs(a.value - b.value) / b.value < 1e-4
    assert a.tail_error < 1e-6
    # the estimated tail accounts for the slow n^{-1/2} convergence of the raw sum
    assert abs((b.partial_sum - a.partial_sum) - (a.tail - b.tail)) < 1e-6


def test_s_eps0_matches_closed_form_sum():
    # sum of squares of the closed form with an exact Hurwitz-type tail
    c = closed_form_eps0(2000).values
    v = orthogonality_function(0.0, 0.0, 2000)
    assert v.partial_sum == pytest.approx(float(np.sum(c**2)), rel=1e-12)


def test_christoffel_darboux_identity():
    v = orthogonality_function(1.3, 0.0, 2000)
    assert v.cd_residual < 1e-8
    f = coefficient_sequence(1.3, 2000).values
    g = coefficient_sequence(0.0, 2000).values
    n = 1999
    lhs = 1.3 * np.sum(f[: n + 1] * g[: n + 1])
    right = offdiag(n) * (f[n + 1] * g[n] - f[n] * g[n + 1])
    wrong = offdiag(n) * (g[n + 1] * f[n] - g[n] * f[n + 1])
    assert abs(lhs - right) < 1e-8 * abs(right)
    assert abs(lhs - wrong) > 1e-3 * abs(wrong)


def test_orthogonality_preconditions():
    with pytest.raises(ValueError):
        orthogonality_function(0.0, 0.0, 100)


# ------------------------------------------------------ extension spectra


def test_extension_spectrum_eps0(spec0):
    ev = np.array(spec0.eigenvalues)
    assert np.all(np.diff(ev) > 0)
    assert np.min(np.abs(ev)) <= spec0.tol
    assert np.max(np.abs(np.sort(-ev) - ev)) < spec0.tol * 100
    assert spec0.diagnostics["symmetry_defect"] < 1e-10
    assert spec0.diagnostics["interlacing_ok"]
    assert spec0.diagnostics["root_residual_ratio"] <= 1.0
    assert spec0.diagnostics["christoffel_darboux_residual"] < 1e-8
    assert len(ev) == 7


def test_extension_spectra_disjoint(spec0, spec1):
    a, b = np.array(spec0.eigenvalues), np.array(spec1.eigenvalues)
    assert np.min(np.abs(a[:, None] - b[None, :])) > 1e-6
    assert np.min(np.abs(b - 1.0)) < spec1.tol


def _ds(e, ref, h=1e-4):
    return (orthogonality_function(e + h, ref).value - orthogonality_function(e - h, ref).value) / (2 * h)


def test_extension_orthogonality(spec1):
    # budget: tail error of S(a, b) plus the eigenvalue uncertainties
    # propagated through dS/de_a and dS/de_b
    ev = spec1.eigenvalues
    du = spec1.diagnostics["root_uncertainty"]
    for i in range(len(ev)):
        for j in range(i + 1, len(ev)):
            v = orthogonality_function(ev[i], ev[j], 2000)
            budget = v.tail_error + abs(_ds(ev[i], ev[j])) * du[i] + abs(_ds(ev[j], ev[i])) * du[j]
            assert abs(v.value) <= budget + 1e-12


def test_root_uncertainty_is_conservative(spec1):
    # compare against roots from a much deeper recursion
    deep = extension_spectrum(1.0, (-10, 10), n_max=16000, tol=1e-10)
    err = np.abs(np.array(spec1.eigenvalues) - deep.eigenvalues)
    assert np.all(err <= np.array(spec1.diagnostics["root_uncertainty"]) + 1e-9)


def test_extension_depth_stability(spec0):
    deeper = extension_spectrum(0.0, (-10, 10), n_max=4000, tol=1e-10)
    assert np.max(np.abs(np.array(deeper.eigenvalues) - spec0.eigenvalues)) < 1e-4


def test_extension_deterministic():
    a = extension_spectrum(0.4, (-3, 3), n_max=600)
    b = extension_spectrum(0.4, (-3, 3), n_max=600)
    assert a.to_dict() == b.to_dict()


def test_extension_close_root_warning():
    # a coarse tolerance makes the gap 1.0 to -0.37 count as suspiciously close
    with pytest.warns(CloseRootsWarning):
        extension_spectrum(1.0, (-1, 2), n_max=1000, tol=0.2)


def test_extension_preconditions():
    with pytest.raises(ValueError):
        extension_spectrum(0.0, (1.0, -1.0))
    with pytest.raises(ValueError):
        extension_spectrum(0.0, (-np.inf, 1.0))
    with pytest.raises(ValueError):
        extension_spectrum(0.0, (-1, 1), tol=1e-12)


def test_spectrum_report_json(spec0):
    d = spec0.to_dict()
    assert set(d) == {"eps_ref", "n_max", "tol", "eigenvalues", "diagnostics"}
    assert {"tail_error", "symmetry_defect", "interlacing_ok"} <= set(d["diagnostics"])


# ------------------------------------------------------------------ Hankel


def test_hankel_examples():
    assert np.array_equal(hankel_matrix([1, 0, 1, 0, 3]), [[1, 0, 1], [0, 1, 0], [1, 0, 3]])
    assert hankel_psd_check([1, 0, 1, 0, 3])
    assert not hankel_psd_check([1, 0, 1, 0, -1])
    assert hankel_psd_check([1, 0, 0, 0, 0])
    with pytest.raises(ValueError):
        MomentSequence(np.ones(4))


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(min_value=-3, max_value=3), min_size=1, max_size=6),
    st.lists(st.floats(min_value=0.01, max_value=1), min_size=6, max_size=6),
    st.integers(min_value=1, max_value=4),
)
def test_hankel_of_discrete_measure_is_psd(points, weights, m):
    x = np.array(points)
    w = np.array(weights[: len(points)])
    s = np.array([np.sum(w * x**k) for k in range(2 * m + 1)])
    assert hankel_psd_check(s)


def test_hankel_gaussian_moments():
    m = 6
    s = [0.0 if k % 2 else float(math.prod(range(k - 1, 0, -2))) for k in range(2 * m + 1)]
    assert hankel_psd_check(s)
