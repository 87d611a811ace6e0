"""Special-function kernel: Hermite polynomials, double-factorial ratios,
Kummer's confluent hypergeometric functions M and U, and Gauss-Hermite rules.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.linalg import eigh_tridiagonal
from scipy.special import digamma

__all__ = [
    "ConvergenceError",
    "PrecisionLossWarning",
    "QuadratureRule",
    "hermite",
    "hermite_normalization",
    "normalized_hermite_table",
    "hermite_function_table",
    "double_factorial_ratio",
    "log_double_factorial_ratio",
    "kummer_m",
    "kummer_u",
    "gauss_hermite_rule",
]

_SQRT_PI = math.sqrt(math.pi)


class ConvergenceError(RuntimeError):
    """A series or iteration failed to converge within its term budget."""


class PrecisionLossWarning(UserWarning):
    """Cancellation in a series has destroyed most significant digits."""


# ---------------------------------------------------------------- Hermite


def hermite_normalization(n: int) -> float:
    """N_n = (sqrt(pi) 2^n n!)^(-1/2), evaluated in log space."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    log_n = -0.5 * (0.5 * math.log(math.pi) + n * math.log(2.0) + math.lgamma(n + 1))
    return math.exp(log_n)


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) and its normalization N_n.

    Uses the three-term recurrence H_{k+1} = 2x H_k - 2k H_{k-1}. For large
    degree and argument the raw polynomial overflows; use
    :func:`normalized_hermite_table` there.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        h = h_prev
    else:
        h = 2.0 * x
        for k in range(1, n):
            h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    if h.ndim == 0:
        h = float(h)
    return h, hermite_normalization(n)


def normalized_hermite_table(n_max: int, x) -> np.ndarray:
    """Rows k = 0..n_max of N_k H_k(x) (no Gaussian factor).

    The normalized recurrence p_{k+1} = sqrt(2/(k+1)) x p_k - sqrt(k/(k+1)) p_{k-1}
    stays bounded by roughly exp(x^2/2) and never overflows for |x| <= 20.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi ** -0.25
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_function_table(n_max: int, x) -> np.ndarray:
    """Rows k = 0..n_max of N_k H_k(x) exp(-x^2/2).

    Same recurrence as :func:`normalized_hermite_table` with the Gaussian in
    the seed, so values stay O(1) wherever the functions are not negligible.
    Valid for |x| < 37; beyond that the seed underflows.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) >= 37):
        raise ValueError("|x| must be below 37")
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x**2)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


# ----------------------------------------------------- double factorials

_DIRECT_LIMIT = 64


@lru_cache(maxsize=1)
def _log_ratio_coefficients(order: int = 12) -> tuple[float, ...]:
    # ln Γ(n+1/2) - ln Γ(n+1) = -ln(n)/2 + sum_k c_k n^{-k}, with
    # c_k = (-1)^{k+1} (B_{k+1}(1/2) - B_{k+1}(1)) / (k (k+1)).
    bern = [Fraction(1)]
    for m in range(1, order + 2):
        acc = Fraction(0)
        for j in range(m):
            acc += math.comb(m + 1, j) * bern[j]
        bern.append(-acc / (m + 1))
    coeffs = []
    for k in range(1, order + 1):
        j = k + 1
        bj = bern[j]
        at_half = (Fraction(2) ** (1 - j) - 1) * bj
        at_one = bj if j != 1 else Fraction(1, 2)
        coeffs.append(float((-1) ** (k + 1) * (at_half - at_one) / (k * (k + 1))))
    return tuple(coeffs)


def log_double_factorial_ratio(n: int) -> float:
    """log of (2n-1)!!/(2n)!!, accurate to ~1e-15 absolute for every n >= 0."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n <= _DIRECT_LIMIT:
        return math.log(double_factorial_ratio(n))
    inv = 1.0 / n
    series = 0.0
    for c in reversed(_log_ratio_coefficients()):
        series = (series + c) * inv
    return -0.5 * math.log(math.pi * n) + series


def double_factorial_ratio(n: int) -> float:
    """(2n-1)!!/(2n)!! = Γ(n+1/2) / (sqrt(pi) Γ(n+1)), with (-1)!! = 0!! = 1."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n <= _DIRECT_LIMIT:
        r = 1.0
        for k in range(1, n + 1):
            r *= (2 * k - 1) / (2 * k)
        return r
    return math.exp(log_double_factorial_ratio(n))


# --------------------------------------------------------------- Kummer


def _m_series(a: float, b: float, z: np.ndarray, max_terms: int) -> tuple[np.ndarray, np.ndarray]:
    total = np.ones_like(z)
    term = np.ones_like(z)
    biggest = np.ones(z.shape)
    active = np.ones(z.shape, dtype=bool)
    for k in range(max_terms):
        term = np.where(active, term * (a + k) * z / ((b + k) * (k + 1)), 0.0)
        total = total + term
        biggest = np.maximum(biggest, np.abs(term))
        active = np.abs(term) >= 1e-17 * np.abs(total)
        if not active.any():
            return total, biggest
    raise ConvergenceError(f"Kummer M series did not converge in {max_terms} terms")


def kummer_m(a: float, b: float, z, max_terms: int = 100_000):
    """Kummer's function M(a, b; z) for real or complex z.

    Taylor series with term-ratio stopping. Points with Re z < 0 are mapped
    through Kummer's transformation M(a,b;z) = e^z M(b-a,b;-z) so the series
    is summed with non-alternating terms on the negative real axis.
    """
    if b <= 0 and float(b).is_integer():
        raise ValueError("b must not be a non-positive integer")
    z_arr = np.asarray(z)
    is_complex = np.iscomplexobj(z_arr)
    zc = np.atleast_1d(z_arr).astype(complex)
    flip = zc.real < 0
    out = np.empty_like(zc)
    if (~flip).any():
        s, big = _m_series(a, b, zc[~flip], max_terms)
        _check_cancellation(s, big)
        out[~flip] = s
    if flip.any():
        zf = zc[flip]
        s, big = _m_series(b - a, b, -zf, max_terms)
        _check_cancellation(s, big)
        out[flip] = np.exp(zf) * s
    if not is_complex:
        out = out.real
    if z_arr.ndim == 0:
        return out[0].item()
    return out.reshape(z_arr.shape)


def _check_cancellation(total: np.ndarray, biggest: np.ndarray) -> None:
    ratio = np.max(biggest / np.maximum(np.abs(total), 1e-300))
    if ratio > 1e8:
        warnings.warn(
            f"Kummer series lost ~{np.log10(ratio):.0f} digits to cancellation",
            PrecisionLossWarning,
            stacklevel=3,
        )


def _u_scalar(a: float, b: float, x: float) -> float:
    # t = u/(1-u) maps [0, inf) to [0, 1); the u^(a-1) endpoint factor is
    # handled exactly by the algebraic-weight rule.
    def g(u: float) -> float:
        if u >= 1.0:
            return 0.0
        w = 1.0 - u
        return w ** (-b) * math.exp(-x * u / w)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            g, 0.0, 1.0, weight="alg", wvar=(a - 1.0, 0.0), epsabs=0.0, epsrel=1.2e-14, limit=400
        )
    if err > 1e-10 * abs(val):
        warnings.warn(f"U({a}, {b}; {x:g}) quadrature error estimate {err / abs(val):.1e}", PrecisionLossWarning)
    return val / math.gamma(a)


def _u_log_series(a: float, x: float) -> float:
    # b = 1: U(a,1;x) = -Γ(a)^-1 sum_k (a)_k x^k/(k!)^2 [ln x + ψ(a+k) - 2ψ(1+k)]
    lx = math.log(x)
    psi_a = float(digamma(a))
    psi_1 = -0.5772156649015329
    coef = 1.0
    total = 0.0
    for k in range(200):
        term = coef * (lx + psi_a - 2.0 * psi_1)
        total += term
        if k > 2 and abs(term) < 1e-17 * abs(total):
            break
        coef *= (a + k) * x / ((k + 1) ** 2)
        psi_a += 1.0 / (a + k)
        psi_1 += 1.0 / (k + 1)
    return -total / math.gamma(a)


def kummer_u(a: float, b: float, x):
    """Tricomi's function U(a, b; x) for real x > 0 and a > 0.

    Integral representation U = Γ(a)^-1 ∫_0^∞ e^{-xt} t^{a-1} (1+t)^{b-a-1} dt.
    Valid for the logarithmic case b = 1 where the M-combination formula is
    singular. For b = 1 and x < 1 the logarithmic power series is summed
    instead; the integrand becomes too flat for the quadrature as x -> 0.
    """
    if a <= 0:
        raise ValueError("integral representation requires a > 0")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise ValueError("kummer_u requires x > 0")
    log_branch = b == 1.0
    flat = [
        _u_log_series(a, float(v)) if log_branch and v < 1.0 else _u_scalar(a, b, float(v))
        for v in np.atleast_1d(x_arr).ravel()
    ]
    if x_arr.ndim == 0:
        return flat[0]
    return np.array(flat).reshape(x_arr.shape)


# ---------------------------------------------------------- quadrature


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for ∫ f(x) e^{-x^2} dx over the real line."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f) -> float:
        return float(np.sum(self.weights * f(self.nodes)))


def gauss_hermite_rule(m: int) -> QuadratureRule:
    """m-point Gauss-Hermite rule by Golub-Welsch."""
    if not 1 <= m <= 200:
        raise ValueError("node count must be in [1, 200]")
    if m == 1:
        return QuadratureRule(np.zeros(1), np.array([_SQRT_PI]))
    off = np.sqrt(np.arange(1, m) / 2.0)
    nodes, vecs = eigh_tridiagonal(np.zeros(m), off)
    # Christoffel weights from the Hermite functions; the eigenvector
    # components underflow for the outer nodes once m exceeds ~100
    phi = hermite_function_table(m - 1, nodes)
    weights = np.exp(-nodes**2) / np.sum(phi**2, axis=0)
    # symmetrize: the rule is exactly symmetric, eigensolver noise is not
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureRule(nodes, weights)
