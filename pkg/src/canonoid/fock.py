"""Truncated Fock-space operator engine.

Ladder operators live on the basis |0>, ..., |N-1>. Every Hamiltonian and
algebra generator is built as a normal-ordered product of truncated ladder
matrices, which reproduces the infinite-matrix elements exactly inside the
basis. Identities that involve products of two off-diagonal operators are
only asserted on an interior block that stays clear of the cutoff.

Algebra checks default to extended precision (``np.clongdouble``): the
stated tolerances are absolute, and at N = 60 the matrix entries reach
~2e5, so double rounding alone would exceed them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

__all__ = [
    "EXTENDED",
    "FockOperator",
    "FockState",
    "RelationCheck",
    "AlgebraReport",
    "TruncationWarning",
    "KINDS",
    "make_ladder",
    "build_operator",
    "commutator",
    "verify_w32",
    "casimir_generators",
    "build_casimir",
    "verify_casimir",
    "heisenberg_picture",
    "heisenberg_constants",
    "heisenberg_report",
    "oscillator_identities",
    "phase_equivalence_check",
    "quadratures",
    "subharmonic_generator",
    "subharmonic_evolve",
    "quadrature_variances",
]

EXTENDED = np.clongdouble

KINDS = ("H0", "H1", "H2", "H3", "H4", "H5", "A", "J0", "Jplus", "Jminus", "Omega")


class TruncationWarning(UserWarning):
    """Probability has leaked into the top levels of the truncated basis."""


@dataclass(frozen=True)
class FockOperator:
    """Dense N x N matrix on the truncated number basis."""

    matrix: np.ndarray
    label: str = ""
    hermitian: bool = False

    def __post_init__(self):
        m = np.array(self.matrix, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def cutoff(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> FockOperator:
        return FockOperator(self.matrix.conj().T, f"{self.label}^dagger", self.hermitian)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def bands(self) -> list[int]:
        """Offsets m - n of the nonzero diagonals (row m, column n)."""
        rows, cols = np.nonzero(self.matrix)
        return sorted(set((rows - cols).tolist()))

    def apply(self, state: FockState) -> FockState:
        _check_cutoffs(self.cutoff, state.cutoff)
        return FockState(self.matrix @ state.amplitudes)

    def __add__(self, other: FockOperator) -> FockOperator:
        _check_cutoffs(self.cutoff, other.cutoff)
        return FockOperator(self.matrix + other.matrix)

    def __sub__(self, other: FockOperator) -> FockOperator:
        _check_cutoffs(self.cutoff, other.cutoff)
        return FockOperator(self.matrix - other.matrix)

    def __matmul__(self, other: FockOperator) -> FockOperator:
        _check_cutoffs(self.cutoff, other.cutoff)
        return FockOperator(self.matrix @ other.matrix)

    def __mul__(self, scalar) -> FockOperator:
        return FockOperator(self.matrix * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class FockState:
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex, copy=True)
        if v.ndim != 1:
            raise ValueError("state amplitudes must be a vector")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @classmethod
    def basis(cls, cutoff: int, n: int) -> FockState:
        v = np.zeros(cutoff, dtype=complex)
        v[n] = 1.0
        return cls(v)

    @classmethod
    def vacuum(cls, cutoff: int) -> FockState:
        return cls.basis(cutoff, 0)


@dataclass(frozen=True)
class RelationCheck:
    relation: str
    block: int
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "block": self.block,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class AlgebraReport:
    cutoff: int
    margin: int
    checks: list[RelationCheck] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, relation: str, block: int, residual: float, tolerance: float) -> RelationCheck:
        check = RelationCheck(relation, block, float(residual), tolerance)
        self.checks.append(check)
        return check

    def residual(self, relation: str) -> float:
        for c in self.checks:
            if c.relation == relation:
                return c.residual
        raise KeyError(relation)

    def to_dict(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "margin": self.margin,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            **self.extra,
        }


def _check_cutoffs(n1: int, n2: int) -> None:
    if n1 != n2:
        raise ValueError(f"cutoff mismatch: {n1} != {n2}")


def _real_dtype(dtype):
    return np.longdouble if np.dtype(dtype) == np.dtype(EXTENDED) else np.float64


def make_ladder(N: int, dtype=complex) -> tuple[FockOperator, FockOperator]:
    """Annihilation and creation operators with hard truncation at N levels."""
    if N < 2:
        raise ValueError("cutoff must be at least 2")
    n = np.arange(1, N).astype(_real_dtype(dtype))
    a = np.diag(np.sqrt(n).astype(dtype), 1)
    return FockOperator(a, "a"), FockOperator(a.conj().T, "a_dagger")


def _number_diag(N: int, dtype) -> np.ndarray:
    return np.diag(np.arange(N).astype(_real_dtype(dtype)).astype(dtype))


def build_operator(kind: str, N: int, eps: float = 0.0, dtype=complex) -> FockOperator:
    """Matrix of one of the quantized Hamiltonians or algebra generators.

    ``Omega`` uses the spectral parameter ``eps``: Omega = J+ - J- - eps.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown operator kind {kind!r}; expected one of {KINDS}")
    if N < 4:
        raise ValueError("cutoff must be at least 4")
    rd = _real_dtype(dtype)
    sqrt2 = np.sqrt(rd(2))
    a_op, ad_op = make_ladder(N, dtype)
    a, ad = a_op.matrix, ad_op.matrix
    eye = np.eye(N, dtype=dtype)
    half = rd(1) / 2

    raise_part = ad @ ad @ a + ad  # J+ = a†(N+1)
    lower_part = ad @ a @ a + a  # -J- = (N+1)a
    cubic_lower = a @ a @ a
    cubic_raise = ad @ ad @ ad

    match kind:
        case "H0" | "J0":
            m, herm = _number_diag(N, dtype) + half * eye, True
        case "H1":
            m, herm = sqrt2 * (raise_part + lower_part), True
        case "A":
            m, herm = raise_part + lower_part, True
        case "H2":
            # summed from the two parts so H2 = H3 + H4 holds bit for bit
            m3 = (1j / (3 * sqrt2)) * (cubic_lower - cubic_raise)
            m4 = (1j / sqrt2) * (raise_part - lower_part)
            m, herm = m3 + m4, True
        case "H3":
            m, herm = (1j / (3 * sqrt2)) * (cubic_lower - cubic_raise), True
        case "H4":
            m, herm = (1j / sqrt2) * (raise_part - lower_part), True
        case "H5":
            m, herm = (cubic_lower + cubic_raise) / (3 * sqrt2), True
        case "Jplus":
            m, herm = raise_part, False
        case "Jminus":
            m, herm = -lower_part, False
        case "Omega":
            m, herm = raise_part + lower_part - rd(eps) * eye, True
    return FockOperator(m.astype(dtype), kind, herm)


def commutator(X: FockOperator, Y: FockOperator) -> FockOperator:
    """XY - YX."""
    _check_cutoffs(X.cutoff, Y.cutoff)
    return FockOperator(X.matrix @ Y.matrix - Y.matrix @ X.matrix, f"[{X.label},{Y.label}]")


def _maxabs(m: np.ndarray, block: int | None = None) -> float:
    if block is not None:
        m = m[:block, :block]
    return float(np.max(np.abs(m))) if m.size else 0.0


def verify_w32(N: int, margin: int = 4, dtype=EXTENDED, tol: float = 1e-12) -> AlgebraReport:
    """Check the quadratic algebra [J0, J±] = ±J±, [J+, J-] = 1/4 + 3 J0^2.

    The last relation is evaluated on rows/cols 0..N-1-margin.
    """
    if margin < 2 or N < margin + 4:
        raise ValueError("need margin >= 2 and N >= margin + 4")
    J0 = build_operator("J0", N, dtype=dtype)
    Jp = build_operator("Jplus", N, dtype=dtype)
    Jm = build_operator("Jminus", N, dtype=dtype)
    inner = N - margin
    rep = AlgebraReport(N, margin)
    rep.add("[J0,J+] = J+", N, _maxabs(commutator(J0, Jp).matrix - Jp.matrix), tol)
    rep.add("[J0,J-] = -J-", N, _maxabs(commutator(J0, Jm).matrix + Jm.matrix), tol)
    j0 = J0.matrix
    rhs = np.eye(N, dtype=dtype) / 4 + 3 * (j0 @ j0)
    rep.add("[J+,J-] = 1/4 + 3 J0^2", inner, _maxabs(commutator(Jp, Jm).matrix - rhs, inner), tol)
    return rep


def casimir_generators(N: int, dtype=EXTENDED) -> tuple[FockOperator, FockOperator, FockOperator]:
    """(N0, N-, N+) from J0 = N0 + i/(2 sqrt3), J- = k1 N-, J+ = k2 N+.

    k1 = k2 = sqrt(i sqrt3 / 2) (principal root); only the product is fixed.
    """
    rd = _real_dtype(dtype)
    sqrt3 = np.sqrt(rd(3))
    k = np.sqrt(np.asarray(1j * sqrt3 / 2, dtype=dtype))
    J0 = build_operator("J0", N, dtype=dtype).matrix
    Jm = build_operator("Jminus", N, dtype=dtype).matrix
    Jp = build_operator("Jplus", N, dtype=dtype).matrix
    shift = np.asarray(1j / (2 * sqrt3), dtype=dtype)
    N0 = J0 - shift * np.eye(N, dtype=dtype)
    return (
        FockOperator(N0, "N0"),
        FockOperator(Jm / k, "N-"),
        FockOperator(Jp / k, "N+"),
    )


def build_casimir(N: int, dtype=EXTENDED) -> FockOperator:
    """C = N- N+ + N0 (N0 + 1) [1 - (i/sqrt3)(2 N0 + 1)]."""
    if N < 8:
        raise ValueError("cutoff must be at least 8")
    N0, Nm, Np = casimir_generators(N, dtype)
    eye = np.eye(N, dtype=dtype)
    n0 = N0.matrix
    inv_sqrt3 = 1 / np.sqrt(_real_dtype(dtype)(3))
    C = Nm.matrix @ Np.matrix + n0 @ (n0 + eye) @ (eye - 1j * inv_sqrt3 * (2 * n0 + eye))
    return FockOperator(C, "C")


def verify_casimir(N: int = 60, margin: int = 6, dtype=EXTENDED, tol: float = 1e-10) -> AlgebraReport:
    """Deformed su(1,1) relations of (N0, N±), the fitted δ, and Casimir commutants."""
    if N < 8 or N < margin + 4:
        raise ValueError("need N >= max(8, margin + 4)")
    N0, Nm, Np = casimir_generators(N, dtype)
    C = build_casimir(N, dtype)
    inner = N - margin
    rep = AlgebraReport(N, margin)
    rep.add("[N0,N+] = N+", N, _maxabs(commutator(N0, Np).matrix - Np.matrix), tol)
    rep.add("[N0,N-] = -N-", N, _maxabs(commutator(N0, Nm).matrix + Nm.matrix), tol)

    n0 = N0.matrix
    lhs = (commutator(Np, Nm).matrix - 2 * n0)[:inner, :inner]
    sq = (n0 @ n0)[:inner, :inner]
    delta = complex(np.vdot(sq.ravel(), lhs.ravel()) / np.vdot(sq.ravel(), sq.ravel()))
    delta_exact = -2j * math.sqrt(3)
    rep.add("[N+,N-] = 2N0 + delta N0^2", inner, _maxabs(lhs - delta_exact * sq), tol)
    rep.add("delta = -2i sqrt3", 0, abs(delta - delta_exact), tol)
    for X in (N0, Np, Nm):
        rep.add(f"[C,{X.label}] = 0", inner, _maxabs(commutator(C, X).matrix, inner), tol)
    rep.extra["delta"] = {"re": delta.real, "im": delta.imag}
    return rep


def heisenberg_picture(X: FockOperator, t: float) -> FockOperator:
    """e^{itH0} X e^{-itH0}, exact because H0 is diagonal.

    This is the evolution a(t) = a e^{-it}, a†(t) = a† e^{it}.
    """
    N = X.cutoff
    n = np.arange(N)
    phase = np.exp(1j * t * (n[:, None] - n[None, :]))
    return FockOperator(X.matrix * phase, f"{X.label}(t)")


def heisenberg_constants(t: float, N: int) -> dict[str, FockOperator]:
    """Explicitly time-dependent combinations that stay constant under H0."""
    if N < 8:
        raise ValueError("cutoff must be at least 8")
    H = {k: heisenberg_picture(build_operator(k, N), t).matrix for k in ("H1", "H3", "H4", "H5")}
    c, s = math.cos(t), math.sin(t)
    c3, s3 = math.cos(3 * t), math.sin(3 * t)
    return {
        "H1": FockOperator(H["H1"] * c - 2 * H["H4"] * s, "H1~"),
        "H4": FockOperator(0.5 * H["H1"] * s + H["H4"] * c, "H4~"),
        "H3": FockOperator(H["H3"] * c3 - H["H5"] * s3, "H3~"),
        "H5": FockOperator(H["H3"] * s3 + H["H5"] * c3, "H5~"),
    }


def heisenberg_report(N: int = 60, times=(0.0, 0.3, 0.7, 1.9), tol: float = 1e-10) -> AlgebraReport:
    """Max deviation of each constant of motion from its t = 0 value."""
    ref = heisenberg_constants(0.0, N)
    rep = AlgebraReport(N, 0)
    for name in ("H1", "H4", "H3", "H5"):
        dev = max(_maxabs(heisenberg_constants(t, N)[name].matrix - ref[name].matrix) for t in times)
        rep.add(f"{name}~(t) = {name}~(0)", N, dev, tol)
    rep.extra["times"] = list(times)
    return rep


def oscillator_identities(N: int = 60, dtype=EXTENDED, tol: float = 1e-12) -> AlgebraReport:
    """[H0,[H0,X]] = k^2 X for the band-k operators H1, H4 (k=1) and H3, H5 (k=3)."""
    if N < 8:
        raise ValueError("cutoff must be at least 8")
    H0 = build_operator("H0", N, dtype=dtype)
    rep = AlgebraReport(N, 0)
    ops = {k: build_operator(k, N, dtype=dtype) for k in ("H1", "H2", "H3", "H4", "H5")}
    for name, freq2 in (("H1", 1), ("H4", 1), ("H3", 9), ("H5", 9)):
        X = ops[name]
        dd = commutator(H0, commutator(H0, X)).matrix
        rep.add(f"[H0,[H0,{name}]] = {freq2} {name}", N, _maxabs(dd - freq2 * X.matrix), tol)
    dd2 = commutator(H0, commutator(H0, ops["H2"])).matrix
    rep.add("[H0,[H0,H2]] - H2 = 8 H3", N, _maxabs(dd2 - ops["H2"].matrix - 8 * ops["H3"].matrix), tol)
    return rep


def phase_equivalence_check(N: int = 40, tol: float = 1e-12, spectrum_tol: float = 1e-10) -> AlgebraReport:
    """Find phases φ ∈ {i, -i} and signs s with diag(φ^n) H1 diag(φ^n)† = s 2 H4."""
    if N < 8:
        raise ValueError("cutoff must be at least 8")
    H1 = build_operator("H1", N).matrix
    H4 = build_operator("H4", N).matrix
    rep = AlgebraReport(N, 0)
    powers = {1j: np.array([1, 1j, -1, -1j]), -1j: np.array([1, -1j, -1, 1j])}
    matches = []
    for phi, cycle in powers.items():
        d = cycle[np.arange(N) % 4]
        conj = d[:, None] * H1 * d.conj()[None, :]
        for s in (1, -1):
            defect = _maxabs(conj - s * 2 * H4)
            if defect < tol:
                matches.append({"phi": "i" if phi == 1j else "-i", "sign": s, "defect": defect})
    if not matches:
        raise RuntimeError("no diagonal phase maps H1 onto ±2 H4")
    best = min(m["defect"] for m in matches)
    rep.add("D H1 D^dagger = s 2 H4", N, best, tol)
    ev1 = np.linalg.eigvalsh(H1)
    ev4 = np.linalg.eigvalsh(2 * H4)
    rep.add("spec(H1) = spec(2 H4)", N, float(np.max(np.abs(ev1 - ev4))), spectrum_tol)
    rep.extra["matches"] = matches
    return rep


def quadratures(N: int, dtype=complex) -> tuple[FockOperator, FockOperator]:
    """q = (a + a†)/sqrt2, p = -i (a - a†)/sqrt2."""
    a_op, ad_op = make_ladder(N, dtype)
    a, ad = a_op.matrix, ad_op.matrix
    q = (a + ad) / math.sqrt(2)
    p = -1j * (a - ad) / math.sqrt(2)
    return FockOperator(q, "q", True), FockOperator(p, "p", True)


def subharmonic_generator(N: int, order: int = 3) -> FockOperator:
    """Anti-hermitian a^n - a†^n."""
    a_op, ad_op = make_ladder(N)
    a, ad = a_op.matrix, ad_op.matrix
    return FockOperator(
        np.linalg.matrix_power(a, order) - np.linalg.matrix_power(ad, order), f"a^{order}-a+^{order}"
    )


def subharmonic_evolve(kt: float, psi0: FockState, N: int | None = None, leak_tol: float = 1e-8) -> FockState:
    """exp[kt (a^3 - a†^3)] psi0 by dense scaling-and-squaring."""
    N = psi0.cutoff if N is None else N
    _check_cutoffs(N, psi0.cutoff)
    if kt == 0:
        return psi0
    U = expm(kt * subharmonic_generator(N).matrix)
    out = FockState(U @ psi0.amplitudes)
    leak = float(out.populations[-5:].sum())
    if leak > leak_tol:
        warnings.warn(
            f"top 5 levels carry {leak:.2e} of the probability at kt={kt}, N={N}",
            TruncationWarning,
            stacklevel=2,
        )
    return out


def quadrature_variances(psi: FockState) -> tuple[float, float]:
    """(Var q, Var p) with hbar = 1."""
    if abs(psi.norm - 1.0) > 1e-8:
        raise ValueError(f"state is not normalized (norm = {psi.norm!r})")
    q, p = quadratures(psi.cutoff)
    v = psi.amplitudes
    out = []
    for op in (q.matrix, p.matrix):
        mean = np.vdot(v, op @ v).real
        second = np.vdot(v, op @ (op @ v)).real
        out.append(float(second - mean**2))
    return out[0], out[1]

