"""Eigenfunctions of A in coordinate (q) and Fock-Bargmann (z) form.

In the q-representation the eigenvalue problem is the singular ODE
x phi'' + phi' + (sqrt2 eps - x^3) phi = 0, with phi = exp(-x^2/2) psi and
psi expanded in normalized Hermite functions with the n-rep coefficients.
In the z-representation chi(z) = sum f_n z^n / sqrt(n!) solves
z chi'' + (1 + z^2) chi' + (z - eps) chi = 0. At eps = 0 both have Kummer
closed forms: c U(1/2, 1; x^2) and M(1/2, 1; -z^2/2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy import integrate
from scipy.special import gammaincc, roots_legendre

from .jacobi import CoefficientSequence
from .special import (
    kummer_m,
    hermite_function_table,
    kummer_u,
    normalized_hermite_table,
    ConvergenceError,
)

__all__ = [
    "SeriesTruncationWarning",
    "SeriesFunction",
    "IntegralIdentity",
    "assemble_q_eigenfunction",
    "q_series_tail",
    "q_residual",
    "closed_form_q_eps0",
    "closed_form_z_eps0",
    "integral_identity_check",
    "weighted_l2_errors",
    "interval_norm",
    "z_eigenfunction",
    "z_residual",
    "bargmann_inner",
    "bargmann_quadrature",
    "coherent_coefficients",
    "h2_plane_wave_residual",
]

SQRT2 = math.sqrt(2.0)


class SeriesTruncationWarning(UserWarning):
    """The last retained series terms are not negligible at this point."""


@dataclass(frozen=True)
class SeriesFunction:
    """Eigenfunction assembled from n-rep coefficients.

    rep='q': sum f_n N_n H_n(x), times exp(-x^2/2) if ``gaussian``.
    rep='z': sum f_n z^n / sqrt(n!).
    """

    rep: Literal["q", "z"]
    coefficients: CoefficientSequence
    max_terms: int | None = None
    gaussian: bool = False

    @property
    def truncation_index(self) -> int:
        n = self.coefficients.n_max
        return n if self.max_terms is None else min(n, self.max_terms - 1)

    def _seq(self) -> CoefficientSequence:
        if self.max_terms is None:
            return self.coefficients
        c = self.coefficients
        return CoefficientSequence(c.eps, c.f0, c.values[: self.truncation_index + 1])

    def __call__(self, arg):
        if self.rep == "q":
            return assemble_q_eigenfunction(self._seq(), arg, "phi" if self.gaussian else "psi")
        if self.rep == "z":
            return z_eigenfunction(arg, self._seq())
        raise ValueError(f"unknown representation {self.rep!r}")


# ------------------------------------------------------------------ q-rep


def _q_terms(seq: CoefficientSequence, x: np.ndarray) -> np.ndarray:
    table = normalized_hermite_table(seq.n_max, x)
    return seq.values.reshape((-1,) + (1,) * x.ndim) * table.reshape((seq.n_max + 1,) + x.shape)


def q_series_tail(seq: CoefficientSequence, x) -> np.ndarray:
    """Magnitude of the last ten retained terms relative to the value."""
    x = np.asarray(x, dtype=float)
    terms = _q_terms(seq, x)
    total = terms.sum(axis=0)
    return np.abs(terms[-10:].sum(axis=0)) / np.maximum(np.abs(total), 1e-300)


def assemble_q_eigenfunction(seq: CoefficientSequence, x, form: str = "psi"):
    """psi(x) = sum_n f_n N_n H_n(x); ``form='phi'`` multiplies by exp(-x^2/2)."""
    if form not in ("psi", "phi"):
        raise ValueError("form must be 'psi' or 'phi'")
    if seq.n_max + 1 < 200:
        raise ValueError("series depth must be at least 200 terms")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 10):
        raise ValueError("|x| must not exceed 10")
    terms = _q_terms(seq, xa)
    total = terms.sum(axis=0)
    rel_tail = np.abs(terms[-10:].sum(axis=0)) / np.maximum(np.abs(total), 1e-300)
    if np.any(rel_tail > 1e-6):
        warnings.warn(
            f"last 10 terms carry {float(np.max(rel_tail)):.1e} of the value; pointwise sum not converged",
            SeriesTruncationWarning,
            stacklevel=2,
        )
    if form == "phi":
        total = total * np.exp(-0.5 * xa**2)
    return float(total) if xa.ndim == 0 else total


def _fd_derivatives(f: Callable, x: np.ndarray, h: float):
    """Value, first and second derivative by 5-point central stencils."""
    fm2, fm1, f0, fp1, fp2 = (np.asarray(f(x + k * h)) for k in (-2, -1, 0, 1, 2))
    d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
    d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    return f0, d1, d2


def _derivatives(f: Callable, x: np.ndarray, h: float):
    v, d1, d2 = _fd_derivatives(f, x, h)
    _, e1, e2 = _fd_derivatives(f, x, h / 2)
    scale = np.maximum(np.abs(v), 1.0)
    # Richardson only where the two step sizes disagree noticeably
    bad = (np.abs(d1 - e1) > 1e-7 * scale) | (np.abs(d2 - e2) > 1e-6 * scale)
    d1 = np.where(bad, (16 * e1 - d1) / 15, d1)
    d2 = np.where(bad, (16 * e2 - d2) / 15, d2)
    return v, d1, d2


def q_residual(phi: Callable, eps: float, grid, form: str = "phi", h: float = 1e-3) -> float:
    """max |ODE residual| / max |function| over the grid.

    form='phi': x phi'' + phi' + (sqrt2 eps - x^3) phi.
    form='psi': x psi'' + (1 - 2x^2) psi' + (sqrt2 eps - 2x) psi.
    """
    x = np.asarray(grid, dtype=float)
    if np.any(np.abs(x) < 0.1):
        raise ValueError("grid must avoid |x| < 0.1, where the equation is singular")
    if np.any(np.abs(x) - 2 * h < 0.05):
        raise ValueError("stencil reaches the singular point")
    v, d1, d2 = _derivatives(phi, x, h)
    if form == "phi":
        res = x * d2 + d1 + (SQRT2 * eps - x**3) * v
    elif form == "psi":
        res = x * d2 + (1 - 2 * x**2) * d1 + (SQRT2 * eps - 2 * x) * v
    else:
        raise ValueError("form must be 'phi' or 'psi'")
    return float(np.max(np.abs(res)) / np.max(np.abs(v)))


def closed_form_q_eps0(x, f0: float = 1.0):
    """c U(1/2, 1; x^2) with c = f0 pi^{-3/4}, extended to x < 0 as an even function."""
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) < 0.05):
        raise ValueError("closed form evaluated only for |x| >= 0.05")
    return f0 * math.pi**-0.75 * kummer_u(0.5, 1.0, xa**2)


@dataclass(frozen=True)
class IntegralIdentity:
    n: int
    lhs: float
    rhs: float
    error_estimate: float

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)


def integral_identity_check(n: int, f0: float = 1.0, abort_above: float = 1e-7) -> IntegralIdentity:
    """f_{2n} against f0 pi^{-3/4} N_{2n} ∫ U(1/2,1;x^2) H_{2n}(x) e^{-x^2} dx."""
    if not 0 <= n <= 20:
        raise ValueError("n must lie in [0, 20]")
    from .jacobi import closed_form_eps0

    k = 2 * n

    def integrand(x: float) -> float:
        nh = normalized_hermite_table(k, x)[k, 0]
        return kummer_u(0.5, 1.0, x * x) * nh * math.exp(-x * x)

    # log singularity at 0 on the first piece; Gaussian decay on the second
    a, ea = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    b, eb = integrate.quad(integrand, 1.0, 12.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    err = 2 * (ea + eb)
    if err > abort_above:
        raise ConvergenceError(f"quadrature error estimate {err:.2e} exceeds {abort_above:.0e}")
    rhs = f0 * math.pi**-0.75 * 2 * (a + b)
    lhs = float(closed_form_eps0(max(k, 2), f0).values[k])
    return IntegralIdentity(n, lhs, rhs, err * math.pi**-0.75 * abs(f0))


def _log_rule(m_inner: int, m_outer: int, outer: float):
    """Nodes/weights on [0, outer] that tolerate a log singularity at 0."""
    u, w = roots_legendre(m_inner)
    u = 0.5 * (u + 1)
    w = 0.5 * w
    # x = u^3 on [0, 1]
    x1, w1 = u**3, 3 * u**2 * w
    v, wv = roots_legendre(m_outer)
    x2 = 1 + 0.5 * (outer - 1) * (v + 1)
    w2 = 0.5 * (outer - 1) * wv
    return np.concatenate([x1, x2]), np.concatenate([w1, w2])


def weighted_l2_errors(seq: CoefficientSequence, cutoffs, reference: Callable | None = None) -> np.ndarray:
    """∫ |psi - sum_{k<=n} f_k N_k H_k|^2 e^{-x^2} dx for each n in ``cutoffs``.

    ``reference`` defaults to the eps=0 closed form; the integrand is even so it
    is integrated over [0, inf) and doubled. Hermite functions of degree n live
    on |x| < sqrt(2n+1), which sets the outer edge and node count.
    """
    cutoffs = [int(c) for c in cutoffs]
    top = max(cutoffs)
    if top > seq.n_max:
        raise ValueError("cutoff beyond sequence depth")
    if top > 400:
        raise ValueError("cutoffs above 400 need an impractically fine rule")
    outer = math.sqrt(2 * top + 1) + 7.0
    x, w = _log_rule(240, max(300, 4 * top), outer)
    if reference is None:
        if seq.eps != 0:
            raise ValueError("no closed form for eps != 0; pass a reference")
        ref = seq.f0 * math.pi**-0.75 * kummer_u(0.5, 1.0, x**2)
    else:
        ref = np.asarray(reference(x), dtype=float)
    # work with Hermite functions so nothing overflows at large x
    table = hermite_function_table(top, x)
    partial = np.cumsum(seq.values[: top + 1, None] * table, axis=0)
    ref = ref * np.exp(-0.5 * x**2)
    return np.array([2 * np.sum(w * (ref - partial[c]) ** 2) for c in cutoffs])


def interval_norm(phi: Callable, L: float) -> float:
    """sqrt(∫_{-L}^{L} |phi|^2 dx) for an even phi, by adaptive quadrature."""
    val, _ = integrate.quad(lambda x: float(phi(x)) ** 2, 0.05, L, limit=400)
    head, _ = integrate.quad(lambda x: float(phi(x)) ** 2, 1e-12, 0.05, limit=200)
    return math.sqrt(2 * (val + head))


# ------------------------------------------------------------------ z-rep


def z_eigenfunction(z, seq: CoefficientSequence | None = None, form: str = "series"):
    """chi(z) = sum f_n z^n / sqrt(n!) or, at eps = 0, M(1/2, 1; -z^2/2)."""
    za = np.asarray(z, dtype=complex)
    if np.any(np.abs(za) > 10):
        raise ValueError("|z| must not exceed 10")
    if form == "U":
        raise ValueError(
            "U(1/2, 1; -z^2/2) has a logarithmic branch point at z = 0 and is not "
            "holomorphic there, so it is not an element of the Bargmann space"
        )
    if form == "M":
        return closed_form_z_eps0(za)
    if form != "series":
        raise ValueError("form must be 'series', 'M' or 'U'")
    if seq is None:
        raise ValueError("series form needs a coefficient sequence")
    total = np.zeros_like(za)
    mono = np.ones_like(za)
    for n, f in enumerate(seq.values):
        if n:
            mono = mono * za / math.sqrt(n)
        if np.any(np.abs(mono) > 1e150):
            raise ConvergenceError("z-series terms exceed 1e150")
        total = total + f * mono
    if za.ndim == 0:
        return complex(total)
    return total


def closed_form_z_eps0(z):
    return kummer_m(0.5, 1.0, -0.5 * np.asarray(z, dtype=complex) ** 2)


def z_residual(chi: Callable, eps: float, grid, h: float = 1e-3) -> float:
    """max |z chi'' + (1 + z^2) chi' + (z - eps) chi| / max |chi|.

    Derivatives are taken along the ray through each grid point, which is
    valid for holomorphic chi.
    """
    z = np.asarray(grid, dtype=complex)
    if np.any(np.abs(z) < 0.1):
        raise ValueError("grid must avoid |z| < 0.1, where the equation is singular")
    d = z / np.abs(z)
    v, d1, d2 = _derivatives(lambda s: np.asarray(chi(d * s), dtype=complex), np.abs(z), h)
    chi1, chi2 = d1 / d, d2 / d**2
    res = z * chi2 + (1 + z**2) * chi1 + (z - eps) * v
    return float(np.max(np.abs(res)) / np.max(np.abs(v)))


def coherent_coefficients(alpha: complex, n_terms: int = 60) -> np.ndarray:
    n = np.arange(n_terms)
    logfac = np.array([math.lgamma(k + 1) for k in n])
    mag = np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * logfac) if alpha != 0 else (n == 0).astype(float)
    return mag * (alpha ** n if alpha != 0 else 1.0)


def bargmann_inner(c1, c2) -> complex:
    """Parseval form of the Bargmann scalar product: sum conj(c1_n) c2_n."""
    c1 = np.asarray(c1, dtype=complex)
    c2 = np.asarray(c2, dtype=complex)
    m = max(len(c1), len(c2))
    c1 = np.pad(c1, (0, m - len(c1)))
    c2 = np.pad(c2, (0, m - len(c2)))
    return complex(np.vdot(c1, c2))


def bargmann_quadrature(c1, c2, R: float = 7.0, n_r: int = 200, n_theta: int | None = None):
    """(∫_{|z|<R} conj(f1) f2 e^{-|z|^2} d^2z / pi, tail bound) in polar coordinates.

    The tail bound sqrt(T1 T2), T = sum |c_n|^2 Q(n+1, R^2), bounds the
    omitted region |z| > R by Cauchy-Schwarz.
    """
    c1 = np.asarray(c1, dtype=complex)
    c2 = np.asarray(c2, dtype=complex)
    m = max(len(c1), len(c2))
    c1 = np.pad(c1, (0, m - len(c1)))
    c2 = np.pad(c2, (0, m - len(c2)))
    n_theta = n_theta or 2 * m + 2
    u, w = roots_legendre(n_r)
    r = 0.5 * R * (u + 1)
    wr = 0.5 * R * w
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    zz = r[:, None] * np.exp(1j * theta[None, :])
    # monomials z^n / sqrt(n!) built by recurrence
    f1 = np.zeros_like(zz)
    f2 = np.zeros_like(zz)
    mono = np.ones_like(zz)
    for n in range(m):
        if n:
            mono = mono * zz / math.sqrt(n)
        f1 += c1[n] * mono
        f2 += c2[n] * mono
    dens = np.conj(f1) * f2 * np.exp(-(r[:, None] ** 2))
    val = np.sum(wr[:, None] * r[:, None] * dens) * (2 * np.pi / n_theta) / np.pi
    q = gammaincc(np.arange(m) + 1, R * R)
    tail = math.sqrt(float(np.sum(np.abs(c1) ** 2 * q)) * float(np.sum(np.abs(c2) ** 2 * q)))
    return complex(val), tail


# ---------------------------------------------------------- H2 plane wave


def h2_plane_wave_residual(k: float, n_points: int = 41):
    """Fit (2i/3) d^3/dx^3 e^{ikx} = lambda e^{ikx} on a grid around 0.

    Third derivative by the 7-point central stencil with step 0.01/max(1,|k|),
    so the stencil error stays uniform in k. Returns (lambda, residual).
    """
    if abs(k) > 20:
        raise ValueError("|k| must not exceed 20")
    h = 0.01 / max(1.0, abs(k))
    x = np.linspace(-1.0, 1.0, n_points)

    def f(s):
        return np.exp(1j * k * s)

    d3 = (f(x - 3 * h) - 8 * f(x - 2 * h) + 13 * f(x - h) - 13 * f(x + h) + 8 * f(x + 2 * h) - f(x + 3 * h)) / (
        8 * h**3
    )
    lphi = (2j / 3) * d3
    phi = f(x)
    lam = np.vdot(phi, lphi) / np.vdot(phi, phi)
    residual = float(np.max(np.abs(lphi - lam * phi)))
    return float(lam.real), residual
