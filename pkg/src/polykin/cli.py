"""Command-line surface: simulations, verification suites and transport fits.

Exit codes: 0 success, 2 configuration or parse error, 3 numerical abort
(NaN or stale majorant), 4 invariant failure. All diagnostics go to
standard error; results are persisted as CSV/JSON.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .backend import BACKEND
from .constants import K_B, K_B_NONDIM
from .core import Ensemble, MaxwellianParams, Species, conserved_totals, sample_maxwellian
from .diagnostics import (
    averaging_report,
    bracket_bounds_check,
    energy_identity_check,
    equilibrium_pvalues,
    kernel_sandwich_check,
    sample_states,
)
from .collision import apply_exchange_collision, apply_frozen_collision, sample_exchange_parameters
from .dsmc import MajorantViolation, NumericalAbort, SolverConfig, run, suggest_dt
from .kernel import (
    KernelParams,
    PairState,
    d_alpha_weight,
    kappa_bounds,
    kappa_ub_closed_form,
    rho_q,
)
from .transport import (
    GasSpec,
    TransportDataset,
    feasible_p_range,
    fit_power_law,
    load_tables,
    prandtl_from_measurements,
    reproduce_tables,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INVARIANT = 4


class ConfigError(Exception):
    """Configuration problem; the message names the offending field path."""


# ---------------------------------------------------------------------------
# config handling


def _get(cfg: dict, path: str, required: bool = True, default=None, cast=None):
    node = cfg
    parts = path.split(".")
    for part in parts:
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(f"{path}: missing required field")
            return default
        node = node[part]
    if cast is not None:
        try:
            return cast(node)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return node


def _require_range(path: str, value: float, lo=None, hi=None, lo_strict=False):
    if lo is not None and (value <= lo if lo_strict else value < lo):
        raise ConfigError(f"{path}: value {value} below the allowed range")
    if hi is not None and value > hi:
        raise ConfigError(f"{path}: value {value} above the allowed range")
    return value


def _species_from_config(cfg: dict) -> Species:
    m = _require_range("species.m", _get(cfg, "species.m", cast=float), lo=0.0, lo_strict=True)
    alpha = _get(cfg, "species.alpha", required=False, cast=float)
    c_v_hat = _get(cfg, "species.c_v_hat", required=False, cast=float)
    if alpha is None and c_v_hat is None:
        raise ConfigError("species.alpha: either species.alpha or species.c_v_hat is required")
    if alpha is not None and c_v_hat is not None:
        raise ConfigError("species.alpha: give either alpha or c_v_hat, not both")
    if alpha is None:
        if not c_v_hat > 1.5:
            raise ConfigError("species.c_v_hat: must exceed 3/2")
        alpha = c_v_hat - 2.5
    if not alpha > -1.0:
        raise ConfigError("species.alpha: must exceed -1")
    return Species(m=m, alpha=alpha)


def _kernel_from_config(cfg: dict, alpha: float) -> KernelParams:
    zeta = _get(cfg, "kernel.zeta", cast=float)
    if not 0.0 < zeta <= 2.0:
        raise ConfigError("kernel.zeta: must lie in (0, 2]")
    K = _get(cfg, "kernel.K", required=False, default=1.0, cast=float)
    if not K > 0.0:
        raise ConfigError("kernel.K: must be positive")
    eta = _get(cfg, "kernel.eta", required=False, default=0.0, cast=float)
    eta_f = _get(cfg, "kernel.eta_f", required=False, default=0.0, cast=float)
    if eta < 0.0 or eta_f < 0.0:
        raise ConfigError("kernel.eta: eta and eta_f must be >= 0")
    omega = _get(cfg, "kernel.omega", required=False, default=1.0, cast=float)
    if not 0.0 <= omega <= 1.0:
        raise ConfigError("kernel.omega: must lie in [0, 1]")
    if _get(cfg, "kernel.angular", required=False) is not None:
        raise ConfigError("kernel.angular: only the constant angular model is supported here")
    return KernelParams(alpha=alpha, zeta=zeta, K=K, eta=eta, eta_f=eta_f, omega=omega)


def _initial_ensemble(cfg: dict, sp: Species, k_B: float) -> Ensemble:
    kind = _get(cfg, "initial.type")
    N = _get(cfg, "initial.N", cast=int)
    if N < 2:
        raise ConfigError("initial.N: need at least 2 particles")
    seed = _get(cfg, "initial.seed", required=False, default=0, cast=int)
    rng = np.random.default_rng(seed)
    rho = _require_range("initial.rho", _get(cfg, "initial.rho", required=False, default=sp.m, cast=float), lo=0.0, lo_strict=True)

    def gauss(T, n, U=(0.0, 0.0, 0.0)):
        return np.asarray(U, dtype=float) + math.sqrt(k_B * T / sp.m) * rng.standard_normal((n, 3))

    def gamma_I(T, n):
        return rng.gamma(sp.alpha + 1.0, scale=k_B * T, size=n)

    if kind == "maxwellian":
        T = _require_range("initial.T", _get(cfg, "initial.T", cast=float), lo=0.0, lo_strict=True)
        U = _get(cfg, "initial.U", required=False, default=[0.0, 0.0, 0.0])
        params = MaxwellianParams(rho=rho, U=U, T=T)
        return sample_maxwellian(params, sp, N, rng, k_B=k_B)
    if kind == "bimodal":
        T1 = _require_range("initial.T1", _get(cfg, "initial.T1", cast=float), lo=0.0, lo_strict=True)
        T2 = _require_range("initial.T2", _get(cfg, "initial.T2", cast=float), lo=0.0, lo_strict=True)
        U1 = np.asarray(_get(cfg, "initial.U1"), dtype=float).reshape(3)
        U2 = np.asarray(_get(cfg, "initial.U2"), dtype=float).reshape(3)
        frac = _get(cfg, "initial.fraction", required=False, default=0.5, cast=float)
        if not 0.0 < frac < 1.0:
            raise ConfigError("initial.fraction: must lie strictly between 0 and 1")
        n1 = int(round(frac * N))
        n1 = min(max(n1, 1), N - 1)
        v = np.vstack([gauss(T1, n1, U1), gauss(T2, N - n1, U2)])
        I = np.concatenate([gamma_I(T1, n1), gamma_I(T2, N - n1)])
        return Ensemble(species=sp, v=v, I=I, n=rho / sp.m)
    if kind == "anisotropic-gaussian":
        T_axes = _get(cfg, "initial.T_axes")
        T_axes = np.asarray(T_axes, dtype=float).reshape(3)
        if np.any(T_axes <= 0.0):
            raise ConfigError("initial.T_axes: all axis temperatures must be positive")
        T_int = _require_range("initial.T_int", _get(cfg, "initial.T_int", cast=float), lo=0.0, lo_strict=True)
        sig = np.sqrt(k_B * T_axes / sp.m)
        v = sig[None, :] * rng.standard_normal((N, 3))
        return Ensemble(species=sp, v=v, I=gamma_I(T_int, N), n=rho / sp.m)
    if kind == "two-temperature":
        T_tr = _require_range("initial.T_tr", _get(cfg, "initial.T_tr", cast=float), lo=0.0, lo_strict=True)
        T_int = _require_range("initial.T_int", _get(cfg, "initial.T_int", cast=float), lo=0.0, lo_strict=True)
        return Ensemble(species=sp, v=gauss(T_tr, N), I=gamma_I(T_int, N), n=rho / sp.m)
    raise ConfigError(
        "initial.type: must be one of maxwellian, bimodal, anisotropic-gaussian, two-temperature"
    )


# ---------------------------------------------------------------------------
# simulate


def _write_timeseries_csv(path: str, records, moment_orders):
    header = (
        ["t", "mass", "px", "py", "pz", "energy"]
        + [f"m1_k{k}" for k in moment_orders]
        + ["entropy", "n_collisions_exchange", "n_collisions_frozen"]
    )
    lines = [",".join(header)]
    for rec in records:
        row = [rec.t, rec.mass, *rec.momentum.tolist(), rec.energy]
        row += [rec.moments[k] for k in moment_orders]
        row += [rec.entropy, rec.n_exchange, rec.n_frozen]
        lines.append(",".join(repr(float(x)) if isinstance(x, float) else str(x) for x in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_simulate(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        units = _get(cfg, "units", required=False, default="nondimensional")
        if units not in {"si", "nondimensional"}:
            raise ConfigError("units: must be 'si' or 'nondimensional'")
        k_B = K_B if units == "si" else K_B_NONDIM
        sp = _species_from_config(cfg)
        kp = _kernel_from_config(cfg, sp.alpha)
        ens = _initial_ensemble(cfg, sp, k_B)
        orders = tuple(_get(cfg, "solver.moment_orders", required=False, default=[2, 4]))
        t_end = _require_range("solver.t_end", _get(cfg, "solver.t_end", cast=float), lo=0.0, lo_strict=True)
        dt = _get(cfg, "solver.dt", required=False, cast=float)
        if dt is None:
            dt = suggest_dt(ens, kp)
        elif not dt > 0.0:
            raise ConfigError("solver.dt: must be positive")
        scfg = SolverConfig(
            dt=dt,
            t_end=t_end,
            seed=_get(cfg, "solver.seed", required=False, default=0, cast=int),
            record_every=_get(cfg, "solver.record_every", required=False, default=10, cast=int),
            moment_orders=orders,
            majorant_safety=_get(cfg, "solver.majorant_safety", required=False, default=1.1, cast=float),
            entropy_bins=_get(cfg, "solver.entropy_bins", required=False, cast=lambda x: None if x is None else int(x)),
        )
        csv_path = _get(cfg, "output.csv", required=False, default="timeseries.csv")
        summary_path = _get(cfg, "output.summary", required=False, default="summary.json")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.threads != 1:
        print(
            "note: multi-threaded execution is statistically, not bitwise, reproducible; "
            "the current implementation runs the serial path",
            file=sys.stderr,
        )

    try:
        records = run(ens, kp, scfg, k_B=k_B)
    except (MajorantViolation, NumericalAbort) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    for path in (csv_path, summary_path):
        parent = os.path.dirname(os.path.abspath(path))
        os.makedirs(parent, exist_ok=True)
    _write_timeseries_csv(csv_path, records, orders)

    mass0, mom0, en0 = ens.initial_totals
    mass1, mom1, en1 = conserved_totals(ens)
    mom_scale = math.sqrt(2.0 * mass0 * en0) if en0 > 0.0 else 1.0
    drift = {
        "mass": abs(mass1 - mass0) / mass0,
        "momentum": float(np.max(np.abs(mom1 - mom0)) / mom_scale),
        "energy": abs(en1 - en0) / en0 if en0 > 0.0 else 0.0,
    }
    summary = {
        "version": __version__,
        "backend": BACKEND,
        "units": units,
        "dt": scfg.dt,
        "n_steps": int(round(scfg.t_end / scfg.dt)),
        "n_collisions_exchange": int(sum(r.n_exchange for r in records)),
        "n_collisions_frozen": int(sum(r.n_frozen for r in records)),
        "conservation_drift": drift,
        "equilibrium_tests": equilibrium_pvalues(ens, k_B=k_B),
        "final_entropy": records[-1].entropy,
    }
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
    print(f"wrote {csv_path} and {summary_path}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _dump_failure(report: dict, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
    print(json.dumps(report, indent=2), file=sys.stderr)


def _verify_collision(args) -> tuple[int, dict]:
    n = int(args.samples)
    rng = np.random.default_rng(args.seed)
    m = 1.0
    states = sample_states(n, m, rng, bracket_range=(1.0, 100.0))
    r = rng.random(n)
    R = rng.random(n)
    zz = rng.random(n)
    phi = 2.0 * math.pi * rng.random(n)
    st = np.sqrt(1.0 - zz * zz)
    # hemisphere around a fixed axis is enough for conservation checks
    sigma = np.stack([st * np.cos(phi), st * np.sin(phi), zz], axis=1)

    out = apply_exchange_collision(states, sigma, r, R, m)
    mom_in = m * (states.v + states.v_star)
    mom_out = m * (out.v + out.v_star)
    e_in = 0.5 * m * (np.einsum("ij,ij->i", states.v, states.v) + np.einsum("ij,ij->i", states.v_star, states.v_star)) + states.I + states.I_star
    e_out = 0.5 * m * (np.einsum("ij,ij->i", out.v, out.v) + np.einsum("ij,ij->i", out.v_star, out.v_star)) + out.I + out.I_star
    mom_err = float(np.max(np.abs(mom_out - mom_in) / np.maximum(np.linalg.norm(mom_in, axis=1), 1.0)[:, None]))
    e_err = float(np.max(np.abs(e_out - e_in) / e_in))

    fr = apply_frozen_collision(states, sigma, m)
    i_exact = bool(np.all(fr.I == states.I) and np.all(fr.I_star == states.I_star))
    u_in = np.linalg.norm(states.u, axis=1)
    u_out = np.linalg.norm(fr.v - fr.v_star, axis=1)
    u_err = float(np.max(np.abs(u_out - u_in) / np.maximum(u_in, 1.0)))

    ok = mom_err < 1e-12 and e_err < 1e-12 and i_exact and u_err < 1e-12
    worst = int(np.argmax(np.abs(e_out - e_in) / e_in))
    report = {
        "suite": "collision",
        "samples": n,
        "momentum_rel_error": mom_err,
        "energy_rel_error": e_err,
        "frozen_internal_exact": i_exact,
        "frozen_relative_speed_rel_error": u_err,
        "pass": ok,
    }
    if not ok:
        report["failing_case"] = {
            "v": states.v[worst].tolist(),
            "v_star": states.v_star[worst].tolist(),
            "I": float(states.I[worst]),
            "I_star": float(states.I_star[worst]),
            "sigma": sigma[worst].tolist(),
            "r": float(r[worst]),
            "R": float(R[worst]),
        }
    return (EXIT_OK if ok else EXIT_INVARIANT), report


def _verify_averaging(args) -> tuple[int, dict]:
    kp = KernelParams(alpha=args.alpha, zeta=args.zeta, eta=args.eta, eta_f=args.eta)
    ks = np.arange(0, args.kmax + 1, 2)
    rep = averaging_report(kp, ks=ks, n_states=args.states, n_mc=int(args.samples), seed=args.seed)
    monotone = bool(np.all(np.diff(rep.c_k) <= 1e-12 * np.abs(rep.c_k[:-1])))
    ok = monotone and (kp.eta == 0.0 or rep.k_star is not None)
    report = {"suite": "averaging", "pass": ok, "monotone": monotone, **rep.to_dict()}
    return (EXIT_OK if ok else EXIT_INVARIANT), report


def _verify_kernel_constants(args) -> tuple[int, dict]:
    from scipy import integrate

    kp = KernelParams(alpha=args.alpha, zeta=args.zeta, eta=args.eta, eta_f=args.eta)
    _, k_ub = kappa_bounds(kp)
    k_ub_closed = kappa_ub_closed_form(kp)
    kappa_rel = abs(k_ub - k_ub_closed) / k_ub_closed

    def rho_q_quad(alpha, zeta, q):
        def inner(R):
            val, _ = integrate.quad(
                lambda rr: d_alpha_weight(rr, R, alpha) * (rr ** (1.0 + 0.5 * zeta) * (1.0 - R)) ** (-1.0 / q),
                0.0,
                1.0,
                limit=200,
            )
            return val

        val, _ = integrate.quad(inner, 0.0, 1.0, limit=200)
        return val

    q_grid = [1.5, 2.0, 3.0, 5.0]
    rho_rel = max(
        abs(rho_q(args.alpha, args.zeta, q) - rho_q_quad(args.alpha, args.zeta, q))
        / rho_q(args.alpha, args.zeta, q)
        for q in q_grid
        if math.isfinite(rho_q(args.alpha, args.zeta, q))
    )
    sandwich = kernel_sandwich_check(kp, m=1.0, n=int(args.samples), seed=args.seed)
    bracket = bracket_bounds_check(args.zeta, m=1.0, n=int(args.samples), seed=args.seed)
    ok = (
        kappa_rel < 1e-8
        and rho_rel < 1e-7
        and sandwich["lower_margin"] > -1e-12
        and sandwich["upper_margin"] > -1e-12
        and bracket["upper_violations"] == 0
    )
    report = {
        "suite": "kernel-constants",
        "pass": ok,
        "kappa_ub_rel_error": kappa_rel,
        "rho_q_rel_error": rho_rel,
        "sandwich": sandwich,
        "bracket": bracket,
    }
    return (EXIT_OK if ok else EXIT_INVARIANT), report


def _verify_energy_identity(args) -> tuple[int, dict]:
    n = int(args.samples)
    rng = np.random.default_rng(args.seed)
    m = 1.0
    states = sample_states(n, m, rng)
    r = rng.random(n)
    R = rng.random(n)
    zz = rng.random(n)
    phi = 2.0 * math.pi * rng.random(n)
    st = np.sqrt(1.0 - zz * zz)
    sigma = np.stack([st * np.cos(phi), st * np.sin(phi), zz], axis=1)
    res = energy_identity_check(states, sigma, r, R, m)
    ok = (
        res["max_line_residual"] < 1e-10
        and res["lambda_margin"] > -1e-12
        and res["upper_margin"] > -1e-12
    )
    report = {"suite": "energy-identity", "pass": ok, "samples": n, **res}
    return (EXIT_OK if ok else EXIT_INVARIANT), report


def cmd_verify(args) -> int:
    suites = {
        "collision": _verify_collision,
        "averaging": _verify_averaging,
        "kernel-constants": _verify_kernel_constants,
        "energy-identity": _verify_energy_identity,
    }
    try:
        code, report = suites[args.suite](args)
    except (ValueError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
    if code != EXIT_OK:
        _dump_failure(report, None)
        print(f"verify {args.suite}: FAIL", file=sys.stderr)
    else:
        print(json.dumps(report, indent=2))
        print(f"verify {args.suite}: PASS", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# transport


def _read_measurements(path: str, kind: str, units_path: str | None):
    temps, values = [], []
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["T", "value"]:
                raise ConfigError(f"{path}:1: expected header 'T,value'")
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                try:
                    temps.append(float(row[0]))
                    values.append(float(row[1]))
                except (IndexError, ValueError) as exc:
                    raise ConfigError(f"{path}:{lineno}: malformed row: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    units = None
    sidecar = units_path or path + ".units.json"
    if os.path.exists(sidecar):
        with open(sidecar, encoding="utf-8") as fh:
            units = json.load(fh)
        if units.get("T") != "K":
            raise ConfigError(f"{sidecar}: only temperatures in K are supported")
    return TransportDataset(T=np.array(temps), value=np.array(values), kind=kind), units


def cmd_transport(args) -> int:
    if args.subcommand == "fit":
        try:
            data, units = _read_measurements(args.data, args.kind, args.units)
            res = fit_power_law(data, T0=args.t0, reference=args.reference)
        except (ConfigError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        out = {**asdict(res), "kind": args.kind, "T0": args.t0, "units": units}
        print(json.dumps(out, indent=2))
        return EXIT_OK
    if args.subcommand == "prandtl":
        try:
            gas = GasSpec(
                name=args.name, m=args.m, c_v_hat=args.cv, mu0=args.mu0, kappa0=args.kappa0
            )
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        pr = prandtl_from_measurements(gas, si_units=not args.nondimensional)
        print(json.dumps({"gas": gas.name, "Pr": pr}, indent=2))
        return EXIT_OK
    if args.subcommand == "feasible-p":
        try:
            res = feasible_p_range(args.alpha, args.zeta)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(
            json.dumps(
                {
                    "alpha": args.alpha,
                    "zeta": args.zeta,
                    "p_bar": res.p_bar if math.isfinite(res.p_bar) else "inf",
                    "binding_constraints": list(res.binding),
                    "candidates": res.candidates,
                },
                indent=2,
            )
        )
        return EXIT_OK
    if args.subcommand == "tables":
        try:
            report = reproduce_tables(load_tables(args.data))
        except (OSError, ValueError, json.JSONDecodeError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        for cell in report.cells:
            status = "PASS" if cell.passed else "FAIL"
            print(f"{status}  {cell.label}: expected {cell.expected}, computed {cell.computed:.4f}, diff {cell.diff:.2e}")
        for note in report.skipped:
            print(f"SKIP  {note}")
        print(f"{report.n_pass} passed, {report.n_fail} failed, {len(report.skipped)} skipped", file=sys.stderr)
        if args.report:
            with open(args.report, "w", encoding="utf-8") as fh:
                json.dump(report.to_dict(), fh, indent=2)
        return EXIT_OK if report.all_pass else EXIT_INVARIANT
    print(f"error: unknown transport subcommand {args.subcommand!r}", file=sys.stderr)
    return EXIT_CONFIG


# ---------------------------------------------------------------------------
# argument parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polykin",
        description="Stochastic kinetics of a polyatomic gas with continuous internal energy.",
    )
    parser.add_argument("--version", action="version", version=f"polykin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a simulation from a JSON config")
    sim.add_argument("config", help="path to the JSON run configuration")
    sim.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker threads; 1 (default) guarantees bit-reproducible output",
    )
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="run a numerical verification suite")
    ver.add_argument("suite", choices=["collision", "averaging", "kernel-constants", "energy-identity"])
    ver.add_argument("--samples", type=float, default=1e5, help="sample count")
    ver.add_argument("--alpha", type=float, default=0.0)
    ver.add_argument("--zeta", type=float, default=1.0)
    ver.add_argument("--eta", type=float, default=0.5)
    ver.add_argument("--kmax", type=int, default=40)
    ver.add_argument("--states", type=int, default=200, help="state sample size for averaging")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--report", help="write the JSON report to this path")
    ver.set_defaults(func=cmd_verify)

    tra = sub.add_parser("transport", help="transport-coefficient pipeline")
    tsub = tra.add_subparsers(dest="subcommand", required=True)

    fit = tsub.add_parser("fit", help="fit the kernel exponent to a (T, value) series")
    fit.add_argument("data", help="CSV file with header 'T,value'")
    fit.add_argument("--kind", choices=["viscosity", "conductivity"], required=True)
    fit.add_argument("--t0", type=float, default=300.0, help="reference temperature [K]")
    fit.add_argument("--units", help="sidecar units JSON (default: <data>.units.json)")
    fit.add_argument("--reference", type=float, help="measured value at T0 for K_scale")
    fit.set_defaults(func=cmd_transport)

    pr = tsub.add_parser("prandtl", help="Prandtl number from reference measurements")
    pr.add_argument("--name", default="gas")
    pr.add_argument("--m", type=float, required=True, help="molecular mass [kg]")
    pr.add_argument("--cv", type=float, required=True, help="dimensionless specific heat")
    pr.add_argument("--mu0", type=float, required=True, help="shear viscosity at T0 [uPa.s]")
    pr.add_argument("--kappa0", type=float, required=True, help="thermal conductivity at T0 [mW/(m.K)]")
    pr.add_argument("--nondimensional", action="store_true", help="treat inputs as unitless")
    pr.set_defaults(func=cmd_transport)

    fp = tsub.add_parser("feasible-p", help="admissible L^p exponent range")
    fp.add_argument("--alpha", type=float, required=True)
    fp.add_argument("--zeta", type=float, required=True)
    fp.set_defaults(func=cmd_transport)

    tab = tsub.add_parser("tables", help="reproduce the bundled reference tables")
    tab.add_argument("--data", help="override the bundled tables.json")
    tab.add_argument("--report", help="write the JSON report to this path")
    tab.set_defaults(func=cmd_transport)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
