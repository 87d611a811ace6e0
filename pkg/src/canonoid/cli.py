"""Command-line front end: one subcommand per verification suite.

Exit status: 0 when every check passes, 1 when a check fails (the report is
still written), 2 for an invalid configuration.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import classical, fock, jacobi, representations
from .special import PrecisionLossWarning

DEFAULT_SEED = 42
SEED_ENV = "CANONOID_SEED"


class ConfigError(ValueError):
    """Configuration outside an operation's preconditions."""


@dataclass
class RunConfig:
    command: str
    params: dict[str, Any] = field(default_factory=dict)
    out: str | None = None
    format: str = "json"
    seed: int = DEFAULT_SEED


@dataclass
class Report:
    """Serializable result: a JSON payload, optional table for CSV, pass flag."""

    payload: dict
    passed: bool
    columns: list[str] | None = None
    rows: list[list] | None = None
    description: str = ""


# ------------------------------------------------------------ serialization


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def encode_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_json({"re": float(obj.real), "im": float(obj.imag)})
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {encode_json(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(encode_json(v) for v in obj) + "]"
    if hasattr(obj, "to_dict"):
        return encode_json(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def encode_csv(report: Report) -> str:
    if report.columns is None or report.rows is None:
        raise ConfigError("this command has no tabular output; use --format json")
    buf = io.StringIO()
    desc = f" {report.description}" if report.description else ""
    buf.write(f"# columns: {', '.join(report.columns)}.{desc}\n")
    buf.write(",".join(report.columns) + "\n")
    for row in report.rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append("" if not math.isfinite(v) else format(float(v), ".17g"))
            else:
                cells.append(str(v))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def write_report(report: Report, fmt: str, path: str | None) -> str:
    text = encode_json(report.payload) + "\n" if fmt == "json" else encode_csv(report)
    if path is None or path == "-":
        sys.stdout.write(text)
        return text
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path!r}: {exc.strerror or exc}") from exc
    return text


# ----------------------------------------------------------------- suites


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def run_spectrum(p: dict, seed: int) -> Report:
    lo, hi = p["interval"]
    _require(math.isfinite(lo) and math.isfinite(hi) and lo < hi, "interval must be finite with lo < hi")
    _require(p["tol"] >= 1e-10, "tol must be at least 1e-10")
    _require(p["n_max"] >= 500, "n-max must be at least 500")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", jacobi.CloseRootsWarning)
        rep = jacobi.extension_spectrum(p["eps_ref"], (lo, hi), p["n_max"], p["tol"])
    ev = np.array(rep.eigenvalues)
    d = rep.diagnostics
    checks = {
        "strictly_increasing": bool(np.all(np.diff(ev) > 0)),
        "contains_eps_ref": bool(np.min(np.abs(ev - p["eps_ref"])) <= p["tol"]),
        "interlacing_ok": bool(d["interlacing_ok"]),
        "christoffel_darboux": bool(d["christoffel_darboux_residual"] < 1e-8),
        "no_merged_roots": not caught,
    }
    payload = rep.to_dict()
    payload["checks"] = checks
    rows = [[i, v] for i, v in enumerate(rep.eigenvalues)]
    return Report(payload, all(checks.values()), ["index", "eigenvalue"], rows)


def run_recursion(p: dict, seed: int) -> Report:
    _require(p["n_max"] >= 2, "n-max must be at least 2")
    _require(p["f0"] != 0, "f0 must be nonzero")
    seq = jacobi.coefficient_sequence(p["eps"], p["n_max"], p["f0"])
    res = seq.recursion_residuals()
    checks = {"recursion_residual": bool(res.max() < 1e-12), "boundary": seq.values[1] == p["eps"] * p["f0"]}
    closed = None
    if p["eps"] == 0:
        closed = jacobi.closed_form_eps0(p["n_max"], p["f0"]).values
        even = np.arange(0, p["n_max"] + 1, 2)
        rel = np.abs(seq.values[even] - closed[even]) / np.abs(closed[even])
        checks["closed_form"] = bool(rel.max() < 1e-10)
    payload = {
        "eps": p["eps"],
        "f0": p["f0"],
        "n_max": p["n_max"],
        "values": seq.values,
        "max_recursion_residual": float(res.max()),
        "checks": checks,
    }
    padded = np.concatenate([[0.0], res, [0.0]])
    rows = [
        [n, seq.values[n], (closed[n] if closed is not None else float("nan")), padded[n]]
        for n in range(p["n_max"] + 1)
    ]
    return Report(
        payload,
        all(checks.values()),
        ["n", "f_n", "closed_form", "recursion_residual"],
        rows,
        "closed_form is empty unless eps = 0",
    )


def _pointwise_q_residual(fn: Callable, eps: float, x: np.ndarray) -> np.ndarray:
    return np.array([representations.q_residual(fn, eps, [v]) for v in x])


def run_eigenfunction(p: dict, seed: int) -> Report:
    lo, hi = p["grid"]
    npts = p["points"]
    _require(npts >= 2 and lo < hi, "grid needs lo < hi and at least 2 points")
    eps = p["eps"]
    if p["rep"] == "q":
        _require(lo >= 0.1 and hi <= 10, "q grid must lie in [0.1, 10]")
        x = np.linspace(lo, hi, npts)
        if eps == 0:
            def fn(s):
                return np.exp(-0.5 * np.asarray(s) ** 2) * representations.closed_form_q_eps0(s)
            source = "closed form c U(1/2,1;x^2), phi = exp(-x^2/2) psi"
        else:
            seq = jacobi.coefficient_sequence(eps, p["n_max"])

            def fn(s):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", representations.SeriesTruncationWarning)
                    return representations.assemble_q_eigenfunction(seq, s, "phi")
            source = "Hermite series (pointwise convergence is slow)"
        values = np.asarray(fn(x), dtype=complex)
        residual = _pointwise_q_residual(fn, eps, x) * np.abs(values) / np.max(np.abs(values))
        rows = [[xi, v.real, v.imag, r] for xi, v, r in zip(x, values, residual)]
    else:
        _require(lo >= 0.1 and hi <= 10, "z grid radii must lie in [0.1, 10]")
        angle = p["angle"]
        z = np.linspace(lo, hi, npts) * np.exp(1j * angle)
        if eps == 0:
            def fn(s):
                return representations.z_eigenfunction(s, form="M")
            source = "closed form M(1/2,1;-z^2/2)"
        else:
            seq = jacobi.coefficient_sequence(eps, p["n_max"])

            def fn(s):
                return representations.z_eigenfunction(s, seq)
            source = "series sum f_n z^n/sqrt(n!)"
        values = np.asarray(fn(z), dtype=complex)
        scale = np.max(np.abs(values))
        residual = np.array([representations.z_residual(fn, eps, [v]) for v in z]) * np.abs(values) / scale
        rows = [[zi.real, zi.imag, v.real, v.imag, r] for zi, v, r in zip(z, values, residual)]
    max_res = float(np.max(residual))
    payload = {
        "rep": p["rep"],
        "eps": eps,
        "source": source,
        "grid": [lo, hi, npts],
        "max_residual": max_res,
        "tolerance": p["tol"],
        "checks": {"ode_residual": max_res < p["tol"]},
    }
    cols = ["x", "value_re", "value_im", "residual"] if p["rep"] == "q" else ["re_z", "im_z", "value_re", "value_im", "residual"]
    return Report(payload, max_res < p["tol"], cols, rows, "residual normalized by max |value| on the grid")


def run_algebra(p: dict, seed: int) -> Report:
    N, m = p["cutoff"], p["margin"]
    _require(m >= 2 and N >= m + 4, "need margin >= 2 and cutoff >= margin + 4")
    _require(N >= 8, "cutoff must be at least 8")
    w32 = fock.verify_w32(N, m)
    cas = fock.verify_casimir(N, max(m, 6))
    phase = fock.phase_equivalence_check(p["phase_cutoff"])
    payload = {"w32": w32.to_dict(), "casimir": cas.to_dict(), "phase": phase.to_dict()}
    ok = w32.passed and cas.passed and phase.passed
    payload["pass"] = ok
    return Report(payload, ok)


def run_heisenberg(p: dict, seed: int) -> Report:
    N = p["cutoff"]
    _require(N >= 8, "cutoff must be at least 8")
    consts = fock.heisenberg_report(N, tuple(p["times"]))
    osc = fock.oscillator_identities(N)
    ok = consts.passed and osc.passed
    return Report({"constants": consts.to_dict(), "double_commutators": osc.to_dict(), "pass": ok}, ok)


def squeeze_oracle(kt: float) -> float:
    """Second-order perturbative variance of exp[kt(a^3 - a+^3)]|0>."""
    return 0.5 + 18.0 * kt * kt


def run_squeeze(p: dict, seed: int) -> Report:
    N = p["cutoff"]
    _require(N >= 8, "cutoff must be at least 8")
    _require(all(abs(k) <= 0.2 for k in p["kt"]), "|kt| must not exceed 0.2")
    rows = []
    ok = True
    leaks = {}
    for kt in p["kt"]:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", fock.TruncationWarning)
            psi = fock.subharmonic_evolve(kt, fock.FockState.vacuum(N))
        vq, vp = fock.quadrature_variances(psi)
        oracle = squeeze_oracle(kt)
        rel = abs((vq - 0.5) - (oracle - 0.5)) / (oracle - 0.5) if kt != 0 else 0.0
        not_squeezed = vq >= 0.5 - 1e-9 and vp >= 0.5 - 1e-9
        ok &= not_squeezed
        if abs(kt) <= 0.02:
            ok &= rel < 0.10
        leaks[repr(kt)] = float(psi.populations[-5:].sum())
        rows.append([kt, vq, vp, oracle, rel, abs(psi.norm - 1), bool(caught)])
    payload = {
        "cutoff": N,
        "rows": [dict(zip(["kt", "var_q", "var_p", "oracle", "oracle_rel_dev", "norm_defect", "leak_warning"], r)) for r in rows],
        "top5_population": leaks,
        "pass": ok,
    }
    cols = ["kt", "var_q", "var_p", "oracle", "oracle_rel_dev", "norm_defect", "leak_warning"]
    return Report(payload, ok, cols, rows, "oracle = 1/2 + 18 kt^2")


def classical_suite(lam: float, variant: int, dt: float, seed: int) -> dict:
    model = classical.FouledModel(lam, variant)
    rng = np.random.default_rng(seed)
    period = 2 * math.pi / lam
    inv = classical.InvariantPair(2.0, 0.7)
    times = np.linspace(0, period, 401)
    ham = classical.hamilton_residual(model, 1, inv, times)
    # invariant and energy drift
    start = classical.trajectory_from_invariants(inv.I1, inv.I2, 0.0, lam)
    t, q, p = classical.harmonic_rk4(start.q, start.p, lam, (0.0, 10 * period), dt)
    drift = {
        "I1": float(np.max(np.abs(classical.invariant_closed(classical.FouledModel(lam, 1), q, p, t) - inv.I1))),
        "I2": float(np.max(np.abs(classical.invariant_closed(classical.FouledModel(lam, 2), q, p, t) - inv.I2))),
        "H0": float(np.max(np.abs(classical.harmonic_energy(q, p, lam) - classical.harmonic_energy(start.q, start.p, lam)))),
    }
    bracket = 0.0
    rotation = 0.0
    for qq, pp, tt in rng.uniform(-2, 2, size=(100, 3)):
        k = classical.poisson_bracket(
            lambda x, y: classical.k1k2_eval(x, y, tt, lam)[0], lambda x, y: classical.k1k2_eval(x, y, tt, lam)[1], qq, pp
        )
        h = classical.poisson_bracket(
            lambda x, y: classical.h1_h2(x, y, lam)[0], lambda x, y: classical.h1_h2(x, y, lam)[1], qq, pp
        )
        bracket = max(bracket, abs(k - h))
        K1, K2, H1, H2 = classical.k1k2_eval(qq, pp, tt, lam)
        rotation = max(rotation, abs(K1**2 + K2**2 - H1**2 - H2**2) / max(H1**2 + H2**2, 1e-300))
    legendre = 0.0
    for qq, pp, tt in rng.uniform(-2, 2, size=(100, 3)) * np.array([1, 1, period]):
        if abs(model.a0(tt)) <= 0.2:
            continue
        for s in (1, -1):
            pt = classical.to_canonoid(classical.ClassicalPoint(qq, pp, tt), model)
            K = classical.fouled_hamiltonian_K(pt, model, s, check=False)
            ps = classical.velocity_root(pt, model, s)
            legendre = max(legendre, abs(K - classical.legendre_value(model, qq, ps, tt)), abs(K - classical.k_simplified(model, qq, ps, tt)))
    checks = {
        "hamilton_residual": ham.max_residual < 1e-6,
        "drift": max(drift.values()) < 1e-9,
        "bracket_identity": bracket < 1e-10,
        "rotation_identity": rotation < 1e-12,
        "legendre_identity": legendre < 1e-9,
    }
    return {
        "model": model.to_dict(),
        "seed": seed,
        "dt": dt,
        "hamilton_residual": ham.max_residual,
        "hamilton_times": ham.n_times,
        "drift": drift,
        "bracket_defect": bracket,
        "rotation_defect": rotation,
        "legendre_defect": legendre,
        "checks": checks,
        "pass": all(checks.values()),
    }


def run_classical(p: dict, seed: int) -> Report:
    _require(p["lam"] > 0, "lambda must be positive")
    _require(p["variant"] in (1, 2), "variant must be 1 or 2")
    _require(0 < p["dt"] <= 0.1, "dt must lie in (0, 0.1]")
    t0, t1 = p["t_span"]
    _require(t1 > t0, "t-span must be increasing")
    payload = classical_suite(p["lam"], p["variant"], p["dt"], seed)
    lam = p["lam"]
    model = classical.FouledModel(lam, p["variant"])
    inv = classical.InvariantPair(2.0, 0.7)
    rows = []
    for t in np.arange(t0, t1 + 1e-12, max(p["dt"], (t1 - t0) / 2000)):
        pt = classical.trajectory_from_invariants(inv.I1, inv.I2, float(t), lam)
        K1, K2, _, _ = classical.k1k2_eval(pt.q, pt.p, t, lam)
        cp = classical.to_canonoid(pt, model)
        if abs(model.a0(t)) > 0.2:
            own = inv.I1 if p["variant"] == 1 else inv.I2
            s = 1 if own * model.a0(t) > 0 else -1
            K = classical.fouled_hamiltonian_K(cp, model, s, check=False)
            res = abs(K - classical.legendre_value(model, pt.q, pt.p, t))
        else:
            res = float("nan")
        ii = classical.invariants_of(pt.q, pt.p, t, lam)
        rows.append([t, pt.q, pt.p, cp.P, ii.I1, ii.I2, classical.harmonic_energy(pt.q, pt.p, lam), K1, K2, res])
    cols = ["t", "q", "p", "P", "I1", "I2", "H0", "K1", "K2", "legendre_residual"]
    return Report(payload, payload["pass"], cols, rows, "legendre_residual empty where |a0| <= 0.2")


def run_ermakov(p: dict, seed: int) -> Report:
    lam = p["lam"]
    _require(lam > 0, "lambda must be positive")
    sigma0 = p["sigma0"] if p["sigma0"] is not None else 1 / math.sqrt(2 * lam)
    _require(sigma0 > 0, "sigma0 must be positive")
    t0, t1 = p["t_span"]
    _require(t1 > t0 and 0 < p["dt"] <= 0.1, "need increasing t-span and dt in (0, 0.1]")

    def omega(t):
        return lam

    traj = classical.ermakov_solve(omega, classical.ErmakovState(sigma0, p["sigma_dot0"], 0.0), (t0, t1), p["dt"])
    c1 = 1 / (math.sqrt(2) * sigma0 * math.sqrt(lam))
    osc = traj.oscillator_residual(omega, c1, 0.0)
    on_fixed_point = sigma0 == 1 / math.sqrt(2 * lam) and p["sigma_dot0"] == 0
    payload = {
        "lambda": lam,
        "sigma0": sigma0,
        "sigma_dot0": p["sigma_dot0"],
        "a0_oscillator_residual": osc,
        "checks": {"a0_oscillator": osc < 1e-6},
    }
    if on_fixed_point:
        sdev = float(np.max(np.abs(traj.sigma - sigma0)))
        tdev = float(np.max(np.abs(traj.theta - 2 * lam * (traj.t - t0))))
        payload.update(sigma_deviation=sdev, theta_deviation=tdev)
        payload["checks"].update(sigma_fixed=sdev < 1e-8, theta_linear=tdev < 1e-7)
    payload["pass"] = all(payload["checks"].values())
    a0 = traj.a0(c1, 0.0)
    rows = [list(r) for r in zip(traj.t, traj.sigma, traj.sigma_dot, traj.theta, a0)]
    return Report(payload, payload["pass"], ["t", "sigma", "sigma_dot", "theta", "a0"], rows, "a0 = sqrt2 sigma c1 cos(theta/2)")


def run_moments(p: dict, seed: int) -> Report:
    s = p["moments"]
    if s is None:
        m = p["gaussian"]
        _require(m >= 1, "gaussian order must be at least 1")
        # standard normal moments: s_k = (k-1)!! for even k
        s = [0.0 if k % 2 else float(math.prod(range(k - 1, 0, -2))) for k in range(2 * m + 1)]
    _require(len(s) % 2 == 1, "moment sequence must have odd length 2m+1")
    H = jacobi.hankel_matrix(np.asarray(s, dtype=float))
    ok = jacobi.hankel_psd_check(np.asarray(s, dtype=float))
    payload = {
        "moments": [float(v) for v in s],
        "min_eigenvalue": float(np.linalg.eigvalsh(H).min()),
        "psd": ok,
        "pass": ok,
    }
    return Report(payload, ok)


SUITES: dict[str, Callable[[dict, int], Report]] = {
    "spectrum": run_spectrum,
    "recursion": run_recursion,
    "eigenfunction": run_eigenfunction,
    "algebra-check": run_algebra,
    "heisenberg": run_heisenberg,
    "squeeze": run_squeeze,
    "classical": run_classical,
    "ermakov": run_ermakov,
    "moment-check": run_moments,
}


# ---------------------------------------------------------------- parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="canonoid", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"overridden by ${SEED_ENV}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="self-adjoint extension spectrum")
    sp.add_argument("--eps-ref", type=float, default=0.0)
    sp.add_argument("--interval", type=float, nargs=2, default=[-10.0, 10.0], metavar=("LO", "HI"))
    sp.add_argument("--n-max", type=int, default=2000)
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = sub.add_parser("recursion", parents=[common], help="n-rep coefficient sequence")
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--n-max", type=int, default=1000)
    sp.add_argument("--f0", type=float, default=1.0)

    sp = sub.add_parser("eigenfunction", parents=[common], help="q- or z-rep eigenfunction table")
    sp.add_argument("--rep", choices=("q", "z"), default="q")
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--grid", type=float, nargs=2, default=[0.25, 3.0], metavar=("LO", "HI"))
    sp.add_argument("--points", type=int, default=56)
    sp.add_argument("--angle", type=float, default=0.0, help="ray angle for the z grid")
    sp.add_argument("--n-max", type=int, default=400)
    sp.add_argument("--tol", type=float, default=1e-6)

    sp = sub.add_parser("algebra-check", parents=[common], help="W-algebra, Casimir and phase checks")
    sp.add_argument("--cutoff", type=int, default=60)
    sp.add_argument("--margin", type=int, default=4)
    sp.add_argument("--phase-cutoff", type=int, default=40)

    sp = sub.add_parser("heisenberg", parents=[common], help="constants of motion and double commutators")
    sp.add_argument("--cutoff", type=int, default=60)
    sp.add_argument("--times", type=float, nargs="+", default=[0.0, 0.3, 0.7, 1.9])

    sp = sub.add_parser("squeeze", parents=[common], help="vacuum quadrature variances under a^3 - a+^3")
    sp.add_argument("--cutoff", type=int, default=60)
    sp.add_argument("--kt", type=float, nargs="+", default=[round(0.01 * k, 2) for k in range(1, 11)])

    sp = sub.add_parser("classical", parents=[common], help="fouled Hamiltonian suite and trajectory table")
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--variant", type=int, default=1)
    sp.add_argument("--t-span", type=float, nargs=2, default=[0.0, 2 * math.pi])
    sp.add_argument("--dt", type=float, default=1e-3)

    sp = sub.add_parser("ermakov", parents=[common], help="Ermakov system integration")
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--sigma0", type=float, default=None, help="default: fixed point 1/sqrt(2 lambda)")
    sp.add_argument("--sigma-dot0", type=float, default=0.0)
    sp.add_argument("--t-span", type=float, nargs=2, default=[0.0, 10.0])
    sp.add_argument("--dt", type=float, default=1e-3)

    sp = sub.add_parser("moment-check", parents=[common], help="Hankel positivity of a moment sequence")
    sp.add_argument("--moments", type=float, nargs="+", default=None)
    sp.add_argument("--gaussian", type=int, default=2, help="use standard-normal moments up to order 2m")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "out", "format", "seed")}
    seed = ns.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            seed = int(env)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return RunConfig(ns.command, params, ns.out, ns.format, seed)


def dispatch(config: RunConfig) -> tuple[int, Report | None]:
    """Run one suite and write its report. Returns (exit status, report)."""
    if config.command not in SUITES:
        raise ConfigError(f"unknown command {config.command!r}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionLossWarning)
        report = SUITES[config.command](config.params, config.seed)
    write_report(report, config.format, config.out)
    return (0 if report.passed else 1), report


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        status, _ = dispatch(config_from_args(ns))
    except ConfigError as exc:
        print(f"canonoid {ns.command}: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"canonoid {ns.command}: {exc}", file=sys.stderr)
        return 2
    return status


if __name__ == "__main__":
    sys.exit(main())
