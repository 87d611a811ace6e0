"""Number-representation eigenproblem of A = a†²a + a†a² + a† + a.

A acts on coefficient sequences as the Jacobi matrix with zero diagonal and
off-diagonals b_n = (n+1)^{3/2}. The difference equation
b_n f_{n+1} - eps f_n + b_{n-1} f_{n-1} = 0, f_1 = eps f_0 has a square-summable
solution for every eps (limit-circle case), so the eigenvalues of one
self-adjoint extension are obtained as the zeros of

    S(eps) = <f(eps), f(eps_ref)>,

the extension being labelled by one of its eigenvalues eps_ref.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.special import zeta

from .special import log_double_factorial_ratio

__all__ = [
    "RecursionOverflowError",
    "CloseRootsWarning",
    "CoefficientSequence",
    "JacobiOperator",
    "SpectrumReport",
    "MomentSequence",
    "OrthogonalityValue",
    "recurrence",
    "coefficient_sequence",
    "closed_form_eps0",
    "decay_exponent",
    "truncated_spectrum",
    "interlaces",
    "limit_circle_diagnostics",
    "orthogonality_function",
    "extension_spectrum",
    "hankel_matrix",
    "hankel_psd_check",
]

OVERFLOW_GUARD = 1e150


class RecursionOverflowError(ArithmeticError):
    pass


class CloseRootsWarning(UserWarning):
    """Two roots of S lie so close that the scan may have merged others."""


def offdiag(n) -> np.ndarray:
    return (np.asarray(n, dtype=float) + 1.0) ** 1.5


@dataclass(frozen=True)
class JacobiOperator:
    """Symmetric tridiagonal operator with zero diagonal and off-diagonals b(n)."""

    rule: Callable[[np.ndarray], np.ndarray] = offdiag

    def b(self, n) -> np.ndarray:
        return self.rule(np.asarray(n))

    def section(self, N: int) -> np.ndarray:
        off = self.b(np.arange(N - 1))
        return np.diag(off, 1) + np.diag(off, -1)

    def apply(self, f: np.ndarray) -> np.ndarray:
        """(A f)_n for n = 0..len(f)-2; the last row needs f_{len(f)} and is dropped."""
        f = np.asarray(f, dtype=float)
        b = self.b(np.arange(len(f)))
        out = b[:-1] * f[1:]
        out[1:] += b[:-2] * f[:-2]
        return out


@dataclass(frozen=True)
class CoefficientSequence:
    eps: float
    f0: float
    values: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def recursion_residuals(self) -> np.ndarray:
        """Scaled residual of every interior recursion triple, n = 1..n_max-1.

        The scale is the largest of the three terms (floored at 1): the
        weights (n+1)^{3/2} amplify storage rounding of f, so scaling by |f|
        alone would grow like n^{3/2} ulp.
        """
        f = self.values
        n = np.arange(1, self.n_max)
        t1, t2, t3 = (n + 1.0) ** 1.5 * f[2:], self.eps * f[1:-1], n**1.5 * f[:-2]
        scale = np.maximum.reduce([np.abs(t1), np.abs(t2), np.abs(t3), np.ones(len(n))])
        return np.abs(t1 - t2 + t3) / scale

    def partial_norms(self) -> np.ndarray:
        return np.cumsum(self.values**2)


@dataclass
class SpectrumReport:
    eps_ref: float
    eigenvalues: list[float]
    n_max: int
    tol: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "eps_ref": self.eps_ref,
            "n_max": self.n_max,
            "tol": self.tol,
            "eigenvalues": list(self.eigenvalues),
            "diagnostics": dict(self.diagnostics),
        }


@dataclass(frozen=True)
class MomentSequence:
    s: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        if s.ndim != 1 or len(s) % 2 == 0:
            raise ValueError("moment sequence must have odd length 2m+1")
        object.__setattr__(self, "s", s)


def recurrence(eps, n_max: int, f0: float = 1.0) -> np.ndarray:
    """Forward recursion for an array of spectral parameters.

    Returns shape (n_max + 1,) + eps.shape.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if f0 == 0:
        raise ValueError("seed f0 must be nonzero")
    eps = np.asarray(eps, dtype=float)
    f = np.empty((n_max + 1,) + eps.shape)
    f[0] = f0
    f[1] = eps * f0
    b = offdiag(np.arange(n_max))
    if np.any(np.abs(f[1]) > OVERFLOW_GUARD):
        raise RecursionOverflowError("coefficient magnitude exceeded 1e150")
    for n in range(1, n_max):
        f[n + 1] = (eps * f[n] - b[n - 1] * f[n - 1]) / b[n]
        if np.any(np.abs(f[n + 1]) > OVERFLOW_GUARD):
            raise RecursionOverflowError(f"coefficient magnitude exceeded 1e150 at n={n + 1}")
    return f


def coefficient_sequence(eps: float, n_max: int, f0: float = 1.0) -> CoefficientSequence:
    return CoefficientSequence(float(eps), float(f0), recurrence(float(eps), n_max, f0))


def closed_form_eps0(n_max: int, f0: float = 1.0) -> CoefficientSequence:
    """f_{2n} = (-1)^n [(2n-1)!!/(2n)!!]^{3/2} f0, odd entries zero."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    vals = np.zeros(n_max + 1)
    for k in range(n_max // 2 + 1):
        vals[2 * k] = (-1) ** k * math.exp(1.5 * log_double_factorial_ratio(k)) * f0
    return CoefficientSequence(0.0, float(f0), vals)


def decay_exponent(seq: CoefficientSequence, window: tuple[int, int], parity: int = 0) -> float:
    """Least-squares slope of log|f_{2n+parity}|^2 against log n for n in window."""
    lo, hi = window
    if lo < 1 or hi - lo + 1 < 20:
        raise ValueError("window must start at n >= 1 and contain at least 20 points")
    if 2 * hi + parity > seq.n_max:
        raise ValueError("window extends beyond the sequence")
    n = np.arange(lo, hi + 1)
    vals = seq.values[2 * n + parity]
    if np.any(vals == 0):
        raise ValueError("window contains zero coefficients")
    slope, _ = np.polyfit(np.log(n), np.log(vals**2), 1)
    return float(slope)


def truncated_spectrum(N: int, op: JacobiOperator | None = None) -> np.ndarray:
    """Sorted eigenvalues of the N x N section."""
    if N < 2:
        raise ValueError("section size must be at least 2")
    op = op or JacobiOperator()
    return eigvalsh_tridiagonal(np.zeros(N), op.b(np.arange(N - 1)))


def interlaces(inner: np.ndarray, outer: np.ndarray, slack: float = 0.0) -> bool:
    """Cauchy interlacing outer[k] <= inner[k] <= outer[k+1]."""
    inner, outer = np.sort(inner), np.sort(outer)
    if len(outer) != len(inner) + 1:
        raise ValueError("outer spectrum must have exactly one more eigenvalue")
    return bool(np.all(outer[:-1] <= inner + slack) and np.all(inner <= outer[1:] + slack))


def limit_circle_diagnostics(N: int = 10**6) -> dict:
    """Carleman-type sum and log-concavity of b_n over n < N."""
    if N < 100:
        raise ValueError("depth must be at least 100")
    n = np.arange(N)
    partial = float(math.fsum(1.0 / offdiag(n)))
    # sum_{n>=N} (n+1)^{-3/2} <= ∫_N^∞ x^{-3/2} dx
    tail_bound = 2.0 / math.sqrt(N)
    k = np.arange(1, N, dtype=np.int64)
    exact = bool(np.all(k * (k + 2) < (k + 1) ** 2))
    ratio = offdiag(k - 1) * offdiag(k + 1) / offdiag(k) ** 2
    return {
        "depth": N,
        "partial_sum": partial,
        "tail_bound": tail_bound,
        "upper_bound": partial + tail_bound,
        "zeta_3_2": float(zeta(1.5)),
        "log_concave": exact and bool(np.all(ratio < 1.0)),
        "max_concavity_ratio": float(ratio.max()),
    }


@dataclass(frozen=True)
class OrthogonalityValue:
    """S(eps) = sum_k f_k(eps) f_k(eps_ref) with its tail budget."""

    eps: float
    eps_ref: float
    n_max: int
    partial_sum: float
    tail: float
    tail_error: float
    wronskian: float
    cd_residual: float

    @property
    def value(self) -> float:
        """Partial sum plus asymptotic tail: the S used for root finding."""
        return self.partial_sum + self.tail


_TAIL_ORDER = 6


def _tail_fit(p: np.ndarray, n_max: int, order: int) -> np.ndarray:
    """Asymptotic continuation of sum_{k>n_max} p_k.

    Each parity class decays as k^{-3/2} (c0 + c1 k^{-1/2} + c2 k^{-1} + ...);
    the coefficients are fit on k in [n_max/4, n_max] and the remaining sums
    are Hurwitz zeta values.
    """
    tail = np.zeros(p.shape[1:])
    start = max(n_max // 4, 8)
    for parity in (0, 1):
        k = np.arange(start, n_max + 1)
        k = k[k % 2 == parity]
        X = np.stack([k ** (-1.5 - 0.5 * i) for i in range(order)], axis=1)
        coef, *_ = np.linalg.lstsq(X, p[k].reshape(len(k), -1), rcond=None)
        first = n_max + 1 if (n_max + 1) % 2 == parity else n_max + 2
        sums = np.array([2.0 ** (-1.5 - 0.5 * i) * zeta(1.5 + 0.5 * i, first / 2.0) for i in range(order)])
        tail = tail + (sums @ coef).reshape(p.shape[1:])
    return tail


def _orthogonality_arrays(eps: np.ndarray, eps_ref: float, n_max: int):
    f = recurrence(eps, n_max)
    g = recurrence(np.float64(eps_ref), n_max)
    g = g.reshape((n_max + 1,) + (1,) * eps.ndim)
    p = f * g
    partial = p.sum(axis=0)
    tail = _tail_fit(p, n_max, _TAIL_ORDER)
    tail_lo = _tail_fit(p, n_max, _TAIL_ORDER - 1)
    b = offdiag(n_max - 1)
    # Christoffel-Darboux: (eps - eps_ref) S_n = b_n (f_{n+1} g_n - f_n g_{n+1}),
    # evaluated at n = n_max - 1 so that the sum runs over k = 0..n_max-1.
    w = b * (f[n_max] * g[n_max - 1] - f[n_max - 1] * g[n_max])
    lhs = (eps - eps_ref) * (partial - p[n_max])
    scale = np.maximum(np.maximum(np.abs(w), np.abs(lhs)), 1e-300)
    cd = np.where((np.abs(w) == 0) & (np.abs(lhs) == 0), 0.0, np.abs(lhs - w) / scale)
    return partial, tail, np.abs(tail - tail_lo), w, cd


def orthogonality_function(eps: float, eps_ref: float, n_max: int = 2000, cd_tol: float = 1e-8) -> OrthogonalityValue:
    if n_max < 500:
        raise ValueError("n_max must be at least 500")
    partial, tail, err, w, cd = _orthogonality_arrays(np.asarray(float(eps)), eps_ref, n_max)
    if abs(eps - eps_ref) > 1e-6 and cd > cd_tol:
        raise ArithmeticError(f"Christoffel-Darboux identity violated: relative residual {float(cd):.3e}")
    return OrthogonalityValue(
        float(eps), float(eps_ref), n_max, float(partial), float(tail), float(err), float(w), float(cd)
    )


def _s_values(eps: np.ndarray, eps_ref: float, n_max: int) -> np.ndarray:
    partial, tail, *_ = _orthogonality_arrays(eps, eps_ref, n_max)
    return partial + tail


def extension_spectrum(
    eps_ref: float,
    interval: tuple[float, float] = (-10.0, 10.0),
    n_max: int = 2000,
    tol: float = 1e-10,
) -> SpectrumReport:
    """Eigenvalues in ``interval`` of the self-adjoint extension containing eps_ref."""
    lo, hi = map(float, interval)
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError("interval must be bounded with lo < hi")
    if tol < 1e-10:
        raise ValueError("tol must be at least 1e-10")
    step = min(0.05, (hi - lo) / 400)
    count = int(math.ceil((hi - lo) / step))
    grid = np.linspace(lo, hi, count + 1)
    s = _s_values(grid, eps_ref, n_max)
    idx = np.nonzero(np.sign(s[:-1]) * np.sign(s[1:]) < 0)[0]
    exact = grid[s == 0.0]

    a, b = grid[idx].copy(), grid[idx + 1].copy()
    sa = s[idx].copy()
    while a.size and np.max(b - a) > tol:
        mid = 0.5 * (a + b)
        sm = _s_values(mid, eps_ref, n_max)
        left = np.sign(sm) == np.sign(sa)
        a = np.where(left, mid, a)
        sa = np.where(left, sm, sa)
        b = np.where(left, b, mid)
    roots = 0.5 * (a + b) if a.size else np.empty(0)

    vals = np.sort(np.concatenate([roots, exact, [float(eps_ref)]]))
    dedup = [vals[0]]
    for v in vals[1:]:
        if v - dedup[-1] > tol:
            dedup.append(v)
    eig = np.array(dedup)
    gaps = np.diff(eig)
    if gaps.size and gaps.min() < 10 * tol:
        warnings.warn("two eigenvalues within 10 tol; the scan may have merged roots", CloseRootsWarning)

    # slope scale for the root-finder contract, and the root shift implied
    # by the tail budget: tail_error / |dS/deps|
    found = eig[np.abs(eig - eps_ref) > tol]
    uncertainty = np.zeros(eig.size)
    tail_err, cd_max, root_ratio = 0.0, 0.0, 0.0
    if found.size:
        h = 1e-4
        slope = (_s_values(found + h, eps_ref, n_max) - _s_values(found - h, eps_ref, n_max)) / (2 * h)
        partial, tail, err, _, cd = _orthogonality_arrays(found, eps_ref, n_max)
        s_at = partial + tail
        root_ratio = float(np.max(np.abs(s_at) / (np.abs(slope) * tol)))
        tail_err = float(np.max(err))
        cd_max = float(np.max(np.where(np.abs(found - eps_ref) > 1e-6, cd, 0.0)))
        uncertainty[np.abs(eig - eps_ref) > tol] = err / np.abs(slope)

    symmetry = float(max(np.min(np.abs(eig + v)) for v in eig)) if eig.size else 0.0
    t50, t51 = truncated_spectrum(50), truncated_spectrum(51)
    return SpectrumReport(
        float(eps_ref),
        [float(v) for v in eig],
        n_max,
        tol,
        {
            "tail_error": tail_err,
            "symmetry_defect": symmetry,
            "interlacing_ok": interlaces(t50, t51),
            "scan_step": step,
            "brackets": int(idx.size),
            "root_residual_ratio": root_ratio,
            "christoffel_darboux_residual": cd_max,
            "root_uncertainty": [float(u) for u in uncertainty],
            "interval": [lo, hi],
        },
    )


def hankel_matrix(s: MomentSequence | np.ndarray) -> np.ndarray:
    seq = s if isinstance(s, MomentSequence) else MomentSequence(s)
    m = (len(seq.s) - 1) // 2
    i = np.arange(m + 1)
    return seq.s[i[:, None] + i[None, :]]


def hankel_psd_check(s: MomentSequence | np.ndarray) -> bool:
    """True iff the Hankel matrix [s_{n+k}] is positive semidefinite."""
    H = hankel_matrix(s)
    ev = np.linalg.eigvalsh(H)
    scale = max(float(np.max(np.abs(ev))), np.finfo(float).tiny)
    return bool(ev.min() >= -1e-12 * scale)
