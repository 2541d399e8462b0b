"""Batch command-line front end: one subcommand per experiment, CSV or JSON rows."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import metadata as _md
from typing import Callable

import numpy as np

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE = 0, 2, 3

SUBCOMMANDS = ("genus1-det", "degen", "laurent", "tau", "dtn", "surgery", "kappa0", "delta-g")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    parameters: dict = field(default_factory=dict)
    output_format: str = "csv"
    output_path: str | None = None

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")


@dataclass
class RunResult:
    rows: list
    metadata: dict = field(default_factory=dict)
    ok: bool = True


# ---------------------------------------------------------------- parsing helpers

def parse_complex(text: str) -> complex:
    """Parse 'a+bi', 'a-bi', 'bi' or 'a'; 'i' and 'j' are both accepted."""
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex number {text!r}") from exc


def parse_sweep(text: str, default_count: int = 5) -> list[float]:
    """'lo:hi[:count]' as a geometric sweep, ordered from the first to the second endpoint."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(f"sweep must be lo:hi[:count], got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        count = int(parts[2]) if len(parts) == 3 else default_count
    except ValueError as exc:
        raise ConfigError(f"cannot parse sweep {text!r}") from exc
    if lo <= 0 or hi <= 0 or count < 2:
        raise ConfigError("sweep endpoints must be positive and count at least 2")
    return [float(x) for x in np.geomspace(lo, hi, count)]


def _pmap(fn: Callable, items: list, jobs: int) -> list:
    """Ordered map, in worker processes when jobs > 1."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


# ---------------------------------------------------------------- experiments

def _genus1_point(sigma: complex) -> dict:
    from .special import epstein_zeta_det
    from .torus import TorusGeometry, torus_det_formula

    t = TorusGeometry(1.0, sigma)
    formula = torus_det_formula(t)
    oracle = epstein_zeta_det(1.0, sigma).value
    return {"tag": "genus1-det-closed-form", "sigma_re": sigma.real, "sigma_im": sigma.imag,
            "formula": formula, "oracle": oracle, "rel_error": abs(formula - oracle) / oracle,
            "ratio": formula / oracle}


def run_genus1_det(p: dict) -> RunResult:
    if p.get("sigma") is not None:
        sigmas = [p["sigma"]]
    else:
        rng = np.random.default_rng(p["seed"])
        sigmas = [complex(rng.uniform(-0.5, 0.5), rng.uniform(0.2, 5.0)) for _ in range(p["count"])]
    for s in sigmas:
        _require(s.imag > 0, "--sigma must have positive imaginary part")
    rows = _pmap(_genus1_point, sigmas, p["jobs"])
    ok = all(r["rel_error"] < p["tol"] for r in rows)
    return RunResult(rows, {"closure_tolerance": p["tol"]}, ok)


def run_degen(p: dict) -> RunResult:
    from .degeneration import DEGEN_CASES, remainder_sweep

    cases = DEGEN_CASES if p["case"] == "all" else (p["case"],)
    params = p["sweep"] or parse_sweep("1e-3:1e-2:6")
    rows, fits = [], {}
    for c in cases:
        sw = remainder_sweep(c, params)
        fits[c] = {"slope": sw.slope, "relative_slope": sw.relative_slope,
                   "fitted_order": sw.fitted_order, "claimed_order": sw.claimed_order}
        for r in sw.rows:
            rows.append({"tag": f"degen-{c}", "param": r.param, "exact_re": r.exact.real,
                         "exact_im": r.exact.imag, "leading_re": r.leading.real,
                         "leading_im": r.leading.imag, "remainder": r.remainder,
                         "relative": r.relative})
    ok = all(abs(f["fitted_order"] - f["claimed_order"]) < p["tol"] for f in fits.values())
    return RunResult(rows, {"fits": fits, "order_tolerance": p["tol"]}, ok)


def _laurent_families(z_q: float):
    from .degeneration import SheetedPoint, laurent_fit, sphere_sampler

    return {
        "constant": lambda s: laurent_fit(lambda X: 0.5 + 0j, s),
        "sphere": lambda s: laurent_fit(sphere_sampler(SheetedPoint(z_q), s), s),
    }


def run_laurent(p: dict) -> RunResult:
    from .degeneration import structure_relations_residual

    s0 = p["sweep"][0] if p["sweep"] else 0.02
    _require(0 < s0 < 0.1, "laurent base parameter must lie in (0, 0.1)")
    rows = []
    for name, fam in _laurent_families(2.0).items():
        r = structure_relations_residual(fam, s0=s0)
        rows.append({"tag": f"laurent-structure-{name}", "s0": s0, "b0_at_0": r.b0_at_0,
                     "a0_minus_b1": r.a0_minus_b1, "b0_prime_plus_half_b1": r.b0_prime_plus_half_b1,
                     "a0_re": r.a0_at_0.real, "b1_re": r.b1_at_0.real})
    worst = max(max(r["b0_at_0"], r["a0_minus_b1"], r["b0_prime_plus_half_b1"]) for r in rows)
    return RunResult(rows, {"worst_residual": worst, "tolerance": p["tol"]}, worst < p["tol"])


def run_tau(p: dict) -> RunResult:
    from . import tau

    action = p["action"]
    if action == "ledger":
        gmax = p["gmax"]
        _require(gmax >= 1, "--gmax must be at least 1")
        rows = []
        for gp in range(1, gmax + 1):
            for gm in range(1, gmax + 1):
                led = tau.ledger_assemble(gp, gm)
                d, e = led.total("Delta_s"), led.total("E_plus_P_Pplus")
                rows.append({"tag": "tau-exponent-ledger", "g_plus": gp, "g_minus": gm,
                             "delta_power": str(d), "e_plus_power": str(e),
                             "pass": d == Fraction(3, 2) and e == 0})
        return RunResult(rows, {}, all(r["pass"] for r in rows))
    if action == "prefactor":
        pre = tau.tau_factorization_prefactor()
        return RunResult([{"tag": "tau-factorization-prefactor", "coefficient": pre.coefficient,
                           "s_power": str(pre.s_power),
                           "delta_power_in_tau_inv6": str(pre.delta_power_in_tau_inv6)}])
    if action == "delta1":
        from .torus import TorusGeometry, torus_det_formula

        sigma = p.get("sigma") or 1j
        _require(sigma.imag > 0, "--sigma must have positive imaginary part")
        f = tau.Genus1Frame(sigma)
        lhs = tau.delta1_closure(f)
        rhs = torus_det_formula(TorusGeometry(1.0, sigma))
        rel = abs(lhs - rhs) / rhs
        return RunResult([{"tag": "tau-delta1-closure", "sigma_re": sigma.real, "sigma_im": sigma.imag,
                           "closure": lhs, "closed_form": rhs, "rel_error": rel}], {}, rel < p["tol"])
    raise ConfigError(f"unknown tau action {action!r}")


def run_dtn(p: dict) -> RunResult:
    from . import circle

    action = p["action"]
    if action == "anchors":
        n = p["trunc"]
        _require(n >= 10, "--trunc must be at least 10")
        exact = circle.det_star_abs_nu()
        mat = circle.CircleOperatorMatrix.from_multiplier(circle.multiplier_abs_nu(), n)
        numeric = circle.zeta_det_regularized(mat, zero_modes=1).value
        rng = np.random.default_rng(p["seed"])
        a = rng.standard_normal(2 * 8 + 1) + 1j * rng.standard_normal(2 * 8 + 1)
        b = rng.standard_normal(2 * 8 + 1) + 1j * rng.standard_normal(2 * 8 + 1)
        eps = 0.3
        lhs = circle.annulus_dtn_action(a, b, eps)
        rhs = circle.annulus_identity_rhs(a, b, eps)
        ident = float(np.abs(lhs - rhs).max() / np.abs(lhs).max())
        rows = [
            {"tag": "dtn-det-abs-nu", "quantity": "det_star_abs_nu_constants", "value": exact,
             "reference": 2 * math.pi, "error": abs(exact - 2 * math.pi)},
            {"tag": "dtn-det-abs-nu", "quantity": "det_star_abs_nu_regularized", "value": numeric,
             "reference": 2 * math.pi, "error": abs(numeric - 2 * math.pi) / (2 * math.pi)},
            {"tag": "dtn-annulus-identity", "quantity": "identity_residual", "value": ident,
             "reference": 0.0, "error": ident},
            {"tag": "dtn-slit-heat-constant", "quantity": "h0_slit_disk",
             "value": float(circle.h0_slit_disk()), "reference": 1 / 24,
             "error": float(abs(circle.h0_slit_disk() - Fraction(1, 24)))},
        ]
        return RunResult(rows, {"trunc": n})
    if action == "slit":
        from .slit import SlitBC, SlitDomainSpec, det_nu_plus_slit_dtn

        rows = []
        for bc in SlitBC:
            spec = SlitDomainSpec(p["slit_ratio"], bc)
            r = det_nu_plus_slit_dtn(spec, p["trunc"])
            rows.append({"tag": f"dtn-slit-{bc.value}", "slit_ratio": spec.slit_ratio,
                         "trunc": p["trunc"], "log_det": r.log_det, "det": r.value,
                         "zeta_at_0": r.zeta_at_0, "error_estimate": r.error_estimate})
        return RunResult(rows, {})
    raise ConfigError(f"unknown dtn action {action!r}")


def _trace_norm_point(args):
    from .surgery import SurgeryScene, dtn_trace_norm_defect, square_torus

    eps, trunc = args
    return dtn_trace_norm_defect(SurgeryScene(square_torus(), eps), trunc)


def run_surgery(p: dict) -> RunResult:
    from . import surgery

    action = p["action"]
    torus = surgery.square_torus()
    if action == "constants":
        rep = surgery.section33_constant_algebra()
        rows = [{"tag": "surgery-constant-algebra", "base": b, "product_power": str(rep.product.powers[b]),
                 "target_power": str(rep.target.powers[b])} for b in surgery.CONSTANT_BASES]
        return RunResult(rows, {"mismatches": {k: [str(x) for x in v] for k, v in rep.mismatches.items()}},
                         rep.ok)
    defaults = {"prop3": "1e-1:1e-3:5", "exterior-det": "1e-2:1e-3:3", "trace-norm": "1e-1:1e-3:5"}
    if action not in defaults:
        raise ConfigError(f"unknown surgery action {action!r}")
    eps = p["sweep"] or parse_sweep(defaults[action])
    limit = 0.9 * surgery.injectivity_radius(torus)
    _require(all(e < limit for e in eps), f"disk radii must be below {limit:g}")
    trunc = p["trunc"]
    if action == "prop3":
        r = surgery.prop3_limit(torus, eps, trunc)
        rows = [{"tag": "surgery-glued-dtn-limit", "eps": e, "ratio": q, "scaled_det": d}
                for e, q, d in zip(r.eps, r.ratios, r.scaled_dets)]
        return RunResult(rows, {"extrapolated": r.extrapolated, "target": 0.5},
                         abs(r.extrapolated - 0.5) / 0.5 < p["tol"])
    if action == "exterior-det":
        r = surgery.corollary1_ratio(torus, eps, trunc)
        rows = [{"tag": "surgery-exterior-det", "eps": e, "exterior_det": d, "ratio_to_asymptotic": q}
                for e, d, q in zip(r.eps, r.exterior_dets, r.ratios)]
        return RunResult(rows, {"slope": r.slope, "target_slope": 1 / 3})
    norms = _pmap(_trace_norm_point, [(e, trunc) for e in eps], p["jobs"])
    from .degeneration import loglog_slope

    slope = loglog_slope(eps, norms)
    rows = [{"tag": "surgery-trace-norm", "eps": e, "trace_norm": v} for e, v in zip(eps, norms)]
    return RunResult(rows, {"slope": slope})


def run_kappa0(p: dict) -> RunResult:
    from .slit import kappa0_estimate

    levels = tuple(p["levels"])
    _require(len(levels) >= 2, "--levels needs at least two grid sizes")
    r = kappa0_estimate(p["slit_ratio"], p["trunc"], levels)
    rows = [
        {"tag": "kappa0-factor", "factor": "det_nu_plus_N_D", "log_value": r.det_nu_plus_ND.log_det,
         "error": r.det_nu_plus_ND.error_estimate},
        {"tag": "kappa0-factor", "factor": "det_star_nu_plus_N_N", "log_value": r.det_star_nu_plus_NN.log_det,
         "error": r.det_star_nu_plus_NN.error_estimate},
        {"tag": "kappa0-factor", "factor": "det_laplacian_D", "log_value": r.det_lap_D.log_det,
         "error": r.det_lap_D.error_bar},
        {"tag": "kappa0-factor", "factor": "det_laplacian_DN", "log_value": r.det_lap_DN.log_det,
         "error": r.det_lap_DN.error_bar},
        {"tag": "kappa0-value", "factor": "kappa0", "log_value": math.log(r.kappa0),
         "error": r.kappa0_error / r.kappa0},
    ]
    rows += [{"tag": "delta-g", "factor": f"delta_{g}", "log_value": math.log(v), "error": (g - 1) * r.kappa0_error / r.kappa0}
             for g, v in r.delta_g.items()]
    meta = dict(r.metadata)
    meta.update({"kappa0": r.kappa0, "kappa0_error": r.kappa0_error, "low_confidence": r.low_confidence})
    return RunResult(rows, meta)


def run_delta_g(p: dict) -> RunResult:
    from .tau import DELTA1, delta_g

    k0 = p.get("kappa0")
    _require(k0 is not None and k0 > 0, "--kappa0 must be given and positive")
    gmax = p["gmax"]
    _require(gmax >= 1, "--gmax must be at least 1")
    rows = [{"tag": "delta-g", "g": g, "delta_g": delta_g(g, k0)} for g in range(1, gmax + 1)]
    return RunResult(rows, {"kappa0": k0, "delta1": DELTA1})


RUNNERS = {
    "genus1-det": run_genus1_det,
    "degen": run_degen,
    "laurent": run_laurent,
    "tau": run_tau,
    "dtn": run_dtn,
    "surgery": run_surgery,
    "kappa0": run_kappa0,
    "delta-g": run_delta_g,
}


# ---------------------------------------------------------------- self tests

def _self_test_rows(sub: str) -> list:
    """Quick exact checks for each subcommand's module."""
    checks: list[tuple[str, bool]] = []
    if sub == "genus1-det":
        from .special import dedekind_eta
        from .torus import TorusGeometry, torus_spectral_det

        eta = dedekind_eta(1j)
        checks.append(("eta(i) = Gamma(1/4)/(2 pi^(3/4))",
                       abs(eta - math.gamma(0.25) / (2 * math.pi**0.75)) < 1e-14))
        d = torus_spectral_det(TorusGeometry(1.0, 1j)).value
        checks.append(("spectral det of the square torus = |eta(i)|^4", abs(d - abs(eta) ** 4) < 1e-10))
    elif sub == "degen":
        from .degeneration import SheetedPoint, case_i_inverse, uniformizer_case_i

        x = uniformizer_case_i(SheetedPoint(0.8 + 0.3j), 0.01)
        checks.append(("z(X(z)) = z", abs(case_i_inverse(x, 0.01) - (0.8 + 0.3j)) < 1e-13))
    elif sub == "laurent":
        from .degeneration import laurent_fit

        r = laurent_fit(lambda X: 0.5 + 0j, 0.01)
        checks.append(("constant sampler gives a0 = 1/2", abs(r.a_coeffs[0] - 0.5) < 1e-12))
    elif sub == "tau":
        from .tau import ledger_assemble, tau_factorization_prefactor

        led = ledger_assemble(1, 1)
        checks.append(("Delta power 3/2", led.total("Delta_s") == Fraction(3, 2)))
        checks.append(("prefactor 1/sqrt 2", abs(tau_factorization_prefactor().coefficient - 2**-0.5) < 1e-15))
    elif sub == "dtn":
        from .circle import corner_heat_coefficient_rational, det_star_abs_nu, h0_slit_disk

        checks.append(("det*|nu| = 2 pi", abs(det_star_abs_nu() - 2 * math.pi) < 1e-12))
        checks.append(("h0 = 1/24", h0_slit_disk() == Fraction(1, 24)))
        checks.append(("straight corner has zero coefficient", corner_heat_coefficient_rational(Fraction(1)) == 0))
    elif sub == "surgery":
        from .surgery import section33_constant_algebra

        checks.append(("constant algebra closes", section33_constant_algebra().ok))
    elif sub == "kappa0":
        from .slit import kappa0_prefactor
        from .special import zeta_constants

        zp = zeta_constants().zeta_prime_at_minus1
        checks.append(("prefactor", abs(kappa0_prefactor() - 2 ** (1 / 3) * math.exp(4 * zp + 5 / 6)) < 1e-15))
    elif sub == "delta-g":
        from .tau import DELTA1, delta_g

        checks.append(("delta_1 = 4/(2 pi)^(4/3)", abs(DELTA1 - 4 / (2 * math.pi) ** (4 / 3)) < 1e-15))
        checks.append(("delta_1 independent of kappa0", delta_g(1, 3.0) == DELTA1))
    return [{"tag": f"self-test-{sub}", "check": name, "pass": ok} for name, ok in checks]


# ---------------------------------------------------------------- output

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.15e}"
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, Fraction):
        return str(v)
    return v


def render(config: RunConfig, result: RunResult) -> str:
    if config.output_format == "json":
        obj = {"config": _jsonable({"subcommand": config.subcommand, **config.parameters}),
               "rows": _jsonable(result.rows), "metadata": _jsonable(result.metadata)}
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"
    cols: list[str] = []
    for r in result.rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    if "tag" in cols:
        cols.remove("tag")
        cols.append("tag")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in result.rows:
        w.writerow([_fmt(r.get(c, "")) for c in cols])
    return buf.getvalue()


def _version() -> str:
    try:
        return _md.version("artifact")
    except _md.PackageNotFoundError:
        return "0+unknown"


def run(config: RunConfig) -> tuple[int, str]:
    """Execute a configuration; returns (exit status, rendered output)."""
    from .degeneration import ConvergenceError
    from .slit import SlitSolveError
    from .surgery import SolverError

    p = config.parameters
    try:
        if p.get("self_test"):
            rows = _self_test_rows(config.subcommand)
            result = RunResult(rows, {}, all(r["pass"] for r in rows))
        else:
            result = RUNNERS[config.subcommand](p)
    except (ConfigError, ValueError) as exc:
        return EXIT_CONFIG, f"config error: {exc}"
    except (ConvergenceError, SolverError, SlitSolveError, np.linalg.LinAlgError) as exc:
        return EXIT_CONVERGENCE, f"convergence failure: {exc}"
    result.metadata.setdefault("version", _version())
    result.metadata.setdefault("seed", p.get("seed"))
    result.metadata.setdefault("tol", p.get("tol"))
    result.metadata["all_checks_pass"] = bool(result.ok)
    return EXIT_OK, render(config, result)


# ---------------------------------------------------------------- argparse

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--self-test", action="store_true", help="run quick exact checks")
    common.add_argument("--seed", type=int, default=12345)
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")

    parser = argparse.ArgumentParser(prog="flatdet", description="Determinants of flat-surface Laplacians.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("genus1-det", parents=[common], help="closed form vs spectral oracle on tori")
    g.add_argument("--sigma", type=parse_complex, default=None)
    g.add_argument("--count", type=int, default=5, help="random lattices when --sigma is absent")
    g.add_argument("--tol", type=float, default=1e-10)

    d = sub.add_parser("degen", parents=[common], help="degeneration remainder sweeps")
    d.add_argument("--case", default="all")
    d.add_argument("--eps-sweep", dest="sweep", type=parse_sweep, default=None)
    d.add_argument("--tol", type=float, default=0.05)

    la = sub.add_parser("laurent", parents=[common], help="Laurent structure relations")
    la.add_argument("--eps-sweep", dest="sweep", type=parse_sweep, default=None,
                    help="first value is the base parameter s0")
    la.add_argument("--tol", type=float, default=1e-6)

    t = sub.add_parser("tau", parents=[common], help="tau-function checks")
    t.add_argument("action", choices=("ledger", "prefactor", "delta1"))
    t.add_argument("--gmax", type=int, default=25)
    t.add_argument("--sigma", type=parse_complex, default=None)
    t.add_argument("--tol", type=float, default=1e-10)

    n = sub.add_parser("dtn", parents=[common], help="circle operators and slit DtN")
    n.add_argument("action", choices=("anchors", "slit"))
    n.add_argument("--trunc", type=int, default=200)
    n.add_argument("--slit-ratio", type=float, default=0.5)
    n.add_argument("--tol", type=float, default=1e-6)

    s = sub.add_parser("surgery", parents=[common], help="gluing experiments on the square torus")
    s.add_argument("action", choices=("prop3", "exterior-det", "trace-norm", "constants"))
    s.add_argument("--eps-sweep", dest="sweep", type=parse_sweep, default=None)
    s.add_argument("--trunc", type=int, default=64)
    s.add_argument("--tol", type=float, default=0.01)

    k = sub.add_parser("kappa0", parents=[common], help="slit-disk constant and delta_g")
    k.add_argument("--slit-ratio", type=float, default=0.5)
    k.add_argument("--trunc", type=int, default=64)
    k.add_argument("--levels", type=lambda x: [int(v) for v in x.split(",")], default=[16, 32, 64])
    k.add_argument("--tol", type=float, default=1e-3)

    dg = sub.add_parser("delta-g", parents=[common], help="delta_g from a given kappa0")
    dg.add_argument("--kappa0", type=float, default=None)
    dg.add_argument("--gmax", type=int, default=6)
    dg.add_argument("--tol", type=float, default=0.0)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "format", "out")}
    if params.get("jobs", 1) < 1:
        raise ConfigError("--jobs must be positive")
    if "trunc" in params and params["trunc"] < 1:
        raise ConfigError("--trunc must be positive")
    if "slit_ratio" in params and not 0 < params["slit_ratio"] < 1:
        raise ConfigError("--slit-ratio must lie in (0, 1)")
    return RunConfig(ns.subcommand, params, ns.format, ns.out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse reports usage errors with status 2, matching the config-error code
        return int(exc.code or 0)
    try:
        config = config_from_args(ns)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    status, text = run(config)
    if status != EXIT_OK:
        print(text, file=sys.stderr)
        return status
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
