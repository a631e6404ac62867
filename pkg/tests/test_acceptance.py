"""End-to-end acceptance criteria.

Each test prints exactly one PASS/FAIL line with its tolerance and elapsed
time, then asserts. Tolerances are never loosened here: a criterion that
cannot be met by a faithful implementation fails honestly.
"""

import itertools
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy import integrate, stats

from polykin.collision import apply_exchange_collision, apply_frozen_collision, sample_exchange_parameters
from polykin.core import (
    Ensemble,
    Species,
    l1_moment,
    maxwellian_bracket_moment,
)
from polykin.diagnostics import (
    averaging_report,
    energy_identity_check,
    equilibrium_pvalues,
    mann_kendall,
    sample_states,
    temperature_from_energy,
)
from polykin.dsmc import SolverConfig, run, suggest_dt
from polykin.kernel import KernelParams, PairState, rho_q
from polykin.transport import fit_power_law, TransportDataset, reproduce_tables


def report(num, name, ok, detail, t0):
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance {num}] {name}: {status} ({detail}, {time.perf_counter() - t0:.2f}s)")


def hemisphere_sigma(rng, n):
    z = rng.random(n)
    phi = 2.0 * math.pi * rng.random(n)
    s = np.sqrt(1.0 - z * z)
    return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)


class TestAcceptance:
    def test_01_tables_reproduction(self):
        t0 = time.perf_counter()
        rep = reproduce_tables(tolerance=2e-3)
        elapsed_ok = time.perf_counter() - t0 < 1.0
        ok = rep.all_pass and elapsed_ok
        bad = [c.label for c in rep.cells if not c.passed]
        report(
            1,
            "reference tables, delta and p_bar within 2e-3",
            ok,
            f"{rep.n_pass}/{len(rep.cells)} cells, out of tolerance: {bad or 'none'}",
            t0,
        )
        assert elapsed_ok
        assert ok, f"cells out of tolerance: {bad}"

    def test_02_rho_q_closed_form_vs_quadrature(self):
        t0 = time.perf_counter()

        def oracle(alpha, zeta, q, epsrel=1e-11):
            pr0 = alpha - (1.0 + zeta / 2.0) / q

            def inner(R):
                c = (1.0 - R) ** (2.0 * alpha + 1.0 - 1.0 / q) * math.sqrt(R)
                val, _ = integrate.quad(lambda r: c, 0.0, 1.0, weight="alg", wvar=(pr0, alpha))
                return val

            val, _ = integrate.quad(inner, 0.0, 1.0, limit=250, epsabs=0.0, epsrel=epsrel)
            return val

        alphas = [-0.03, 0.0, 0.0901, 0.25, 0.5, 1.0, 2.0]
        zetas = [0.254, 0.5329, 1.0, 1.5, 2.0]
        qs = [1.5, 2.0, 3.0, 5.0, 10.0]
        grid = [
            (a, z, q)
            for a, z, q in itertools.product(alphas, zetas, qs)
            if math.isfinite(rho_q(a, z, q))
        ][:50]
        assert len(grid) == 50
        worst = max(
            abs(rho_q(a, z, q) - oracle(a, z, q)) / rho_q(a, z, q) for a, z, q in grid
        )
        elapsed_ok = time.perf_counter() - t0 < 10.0
        ok = worst < 1e-8 and elapsed_ok
        report(2, "rho_q closed form vs adaptive quadrature on 50 points", ok, f"worst rel err {worst:.2e} (tol 1e-8)", t0)
        assert elapsed_ok
        assert ok

    def test_03_collision_conservation(self):
        t0 = time.perf_counter()
        n = 1_000_000
        rng = np.random.default_rng(31)
        m = 1.3
        p = sample_states(n, m, rng, bracket_range=(1.0, 100.0))
        sigma = hemisphere_sigma(rng, n)
        r = rng.random(n)
        R = rng.random(n)
        out = apply_exchange_collision(p, sigma, r, R, m)
        mom_err = float(
            np.max(
                np.abs(m * (out.v + out.v_star) - m * (p.v + p.v_star))
                / np.maximum(np.linalg.norm(m * (p.v + p.v_star), axis=1), 1.0)[:, None]
            )
        )
        e_in = 0.5 * m * (
            np.einsum("ij,ij->i", p.v, p.v) + np.einsum("ij,ij->i", p.v_star, p.v_star)
        ) + p.I + p.I_star
        e_out = 0.5 * m * (
            np.einsum("ij,ij->i", out.v, out.v) + np.einsum("ij,ij->i", out.v_star, out.v_star)
        ) + out.I + out.I_star
        e_err = float(np.max(np.abs(e_out - e_in) / e_in))

        fr = apply_frozen_collision(p, sigma, m)
        i_exact = bool(np.array_equal(fr.I, p.I) and np.array_equal(fr.I_star, p.I_star))
        u_in = np.linalg.norm(p.u, axis=1)
        u_out = np.linalg.norm(fr.v - fr.v_star, axis=1)
        u_err = float(np.max(np.abs(u_out - u_in) / np.maximum(u_in, 1e-300)))

        elapsed_ok = time.perf_counter() - t0 < 5.0
        ok = mom_err < 1e-12 and e_err < 1e-12 and i_exact and u_err < 1e-12 and elapsed_ok
        report(
            3,
            "1e6 exchange collisions conserve to 1e-12; frozen I bit-exact",
            ok,
            f"mom {mom_err:.1e}, energy {e_err:.1e}, |u| {u_err:.1e}, I exact {i_exact}",
            t0,
        )
        assert elapsed_ok
        assert ok

    def test_04_energy_identity_and_povzner(self):
        t0 = time.perf_counter()
        n = 1_000_000
        rng = np.random.default_rng(41)
        m = 1.0
        p = sample_states(n, m, rng)
        sigma = hemisphere_sigma(rng, n)
        res = energy_identity_check(p, sigma, rng.random(n), rng.random(n), m)
        identity_ok = (
            res["max_line_residual"] <= 1e-10
            and res["lambda_margin"] >= -1e-12
            and res["upper_margin"] >= -1e-12
        )

        kp = KernelParams(alpha=0.0, zeta=1.0, eta=0.5, eta_f=0.5)
        rep = averaging_report(kp, ks=np.arange(0, 42, 2), n_states=200, n_mc=10_000, seed=42)
        monotone = bool(np.all(np.diff(rep.c_k) <= 1e-12))
        found = rep.k_star is not None

        elapsed_ok = time.perf_counter() - t0 < 120.0
        ok = identity_ok and monotone and found and elapsed_ok
        report(
            4,
            "energy identity to 1e-10 on 1e6 states; C_k non-increasing, k* found",
            ok,
            f"residual {res['max_line_residual']:.1e}, monotone {monotone}, k* {rep.k_star}",
            t0,
        )
        assert elapsed_ok
        assert ok

    def test_05_bimodal_relaxation(self):
        t0 = time.perf_counter()
        sp = Species(m=1.0, alpha=0.3)
        kp = KernelParams(alpha=sp.alpha, zeta=1.0, eta=0.5, omega=1.0)
        N = 100_000
        rng = np.random.default_rng(51)
        n1 = N // 2
        T0, drift = 0.5, 1.5
        v = math.sqrt(T0 / sp.m) * rng.standard_normal((N, 3))
        v[:n1, 0] += drift
        v[n1:, 0] -= drift
        I = rng.gamma(sp.alpha + 1.0, scale=T0, size=N)
        ens = Ensemble(species=sp, v=v, I=I, n=1.0)
        dt = suggest_dt(ens, kp)
        cfg = SolverConfig(dt=dt, t_end=300 * dt, seed=52, record_every=10, moment_orders=(3, 4, 6))
        records = run(ens, kp, cfg, k_B=1.0)

        entropy = [r.entropy for r in records if math.isfinite(r.entropy)]
        mk = mann_kendall(entropy)
        trend_ok = mk["p_decreasing"] < 0.01

        eq = equilibrium_pvalues(ens, k_B=1.0)
        eq_ok = all(pv > 0.01 for pv in eq["p_velocity"]) and eq["p_internal"] > 0.01

        T = temperature_from_energy(ens, 1.0)
        moments_ok = True
        worst_rel = 0.0
        for k in (3, 4, 6):
            ref = maxwellian_bracket_moment(k, T, sp, rho=ens.n * sp.m, k_B=1.0)
            rel = abs(l1_moment(ens, k) - ref) / ref
            worst_rel = max(worst_rel, rel)
            moments_ok = moments_ok and rel < 0.02

        elapsed_ok = time.perf_counter() - t0 < 300.0
        ok = trend_ok and eq_ok and moments_ok and elapsed_ok
        report(
            5,
            "bimodal relaxation: entropy decreasing, Maxwellian limit, moments to 2%",
            ok,
            f"MK p {mk['p_decreasing']:.1e}, eq p_min {min(min(eq['p_velocity']), eq['p_internal']):.3f}, "
            f"worst moment rel {worst_rel:.3f}",
            t0,
        )
        assert elapsed_ok
        assert ok

    def test_06_frozen_only_dynamics(self):
        t0 = time.perf_counter()
        sp = Species(m=1.0, alpha=0.2)
        kp = KernelParams(alpha=sp.alpha, zeta=1.0, eta_f=0.5, omega=0.0)
        N = 50_000
        rng = np.random.default_rng(61)
        sig = np.sqrt(np.array([2.0, 0.6, 0.6]) / sp.m)
        v = sig[None, :] * rng.standard_normal((N, 3))
        I = rng.gamma(sp.alpha + 1.0, size=N)
        ens = Ensemble(species=sp, v=v, I=I, n=1.0)
        I_sorted = np.sort(ens.I.copy())
        ke0 = float(np.einsum("ij,ij->i", ens.v, ens.v).sum())
        dt = suggest_dt(ens, kp)
        cfg = SolverConfig(dt=dt, t_end=200 * dt, seed=62)
        run(ens, kp, cfg, k_B=1.0)

        multiset_ok = bool(np.array_equal(np.sort(ens.I), I_sorted))
        ke1 = float(np.einsum("ij,ij->i", ens.v, ens.v).sum())
        ke_err = abs(ke1 - ke0) / ke0

        # kinetic energy is exactly conserved, so the target Gaussian
        # temperature follows from it rather than from a fitted parameter
        T_tr = sp.m * ke1 / (3.0 * N)
        sigma_eq = math.sqrt(T_tr / sp.m)
        edges = stats.norm.ppf(np.linspace(0.0, 1.0, 51), scale=sigma_eq)
        edges[0], edges[-1] = -np.inf, np.inf
        p_vals = []
        for axis in range(3):
            counts, _ = np.histogram(ens.v[:, axis] - ens.v[:, axis].mean(), bins=edges)
            stat = float(np.sum((counts - N / 50) ** 2 / (N / 50)))
            p_vals.append(float(stats.chi2.sf(stat, 49)))
        gauss_ok = min(p_vals) > 0.01

        elapsed_ok = time.perf_counter() - t0 < 120.0
        ok = multiset_ok and ke_err < 1e-10 and gauss_ok and elapsed_ok
        report(
            6,
            "omega=0: internal energies invariant, kinetic conserved, velocities Gaussian",
            ok,
            f"multiset {multiset_ok}, KE rel {ke_err:.1e}, min p {min(p_vals):.3f}",
            t0,
        )
        assert elapsed_ok
        assert ok

    def test_07_parameter_sampler_distribution(self):
        t0 = time.perf_counter()
        n = 100_000
        m = 1.0
        results = []
        for alpha, zeta in [(-0.03, 0.6076), (0.0, 1.0), (0.5, 1.5)]:
            kp = KernelParams(alpha=alpha, zeta=zeta, eta=0.7)
            a, hz = alpha, 0.5 * zeta
            b_tr_r = stats.beta(a + 1.0, a + 1.0)
            b_tr_R = stats.beta((zeta + 3.0) / 2.0, 2.0 * a + 2.0)
            b_in_r = stats.beta(a + 1.0 + hz, a + 1.0)
            b_in_R = stats.beta(1.5, 2.0 * a + 2.0 + hz)
            rng = np.random.default_rng(71)

            def draw(pair):
                batch = PairState(
                    v=np.tile(pair.v, (n, 1)),
                    v_star=np.tile(pair.v_star, (n, 1)),
                    I=np.full(n, pair.I),
                    I_star=np.full(n, pair.I_star),
                )
                _, rs, Rs = sample_exchange_parameters(batch, kp, m, rng)
                return rs, Rs

            # translation-dominated regime: only the first kernel term fires
            p_tr = PairState(v=np.array([1.0, 0.0, 0.0]), v_star=np.zeros(3), I=0.0, I_star=0.0)
            rs, Rs = draw(p_tr)
            results.append(stats.kstest(rs, b_tr_r.cdf).pvalue)
            results.append(stats.kstest(Rs, b_tr_R.cdf).pvalue)

            # internal-dominated regime: second term, and its mirror
            p_in = PairState(v=np.zeros(3), v_star=np.zeros(3), I=1.0, I_star=0.0)
            rs, Rs = draw(p_in)
            results.append(stats.kstest(rs, b_in_r.cdf).pvalue)
            results.append(stats.kstest(Rs, b_in_R.cdf).pvalue)

            p_mir = PairState(v=np.zeros(3), v_star=np.zeros(3), I=0.0, I_star=1.0)
            rs, _ = draw(p_mir)
            results.append(stats.kstest(rs, lambda x: b_in_r.sf(1.0 - x)).pvalue)

            # mixed regime: the three-term mixture law
            p_mx = PairState(v=np.array([1.0, 0.0, 0.0]), v_star=np.zeros(3), I=0.4, I_star=0.9)
            w1 = kp.A_R * 1.0**hz
            w2 = kp.eta * kp.A_r * 0.4**hz
            w3 = kp.eta * kp.A_r * 0.9**hz
            wt = w1 + w2 + w3

            def cdf_r(x, w1=w1, w2=w2, w3=w3, wt=wt, b1=b_tr_r, b2=b_in_r):
                return (w1 * b1.cdf(x) + w2 * b2.cdf(x) + w3 * b2.sf(1.0 - x)) / wt

            def cdf_R(x, w1=w1, w2=w2, w3=w3, wt=wt, b1=b_tr_R, b2=b_in_R):
                return (w1 * b1.cdf(x) + (w2 + w3) * b2.cdf(x)) / wt

            rs, Rs = draw(p_mx)
            results.append(stats.kstest(rs, cdf_r).pvalue)
            results.append(stats.kstest(Rs, cdf_R).pvalue)

        elapsed_ok = time.perf_counter() - t0 < 30.0
        ok = min(results) > 0.01 and elapsed_ok
        report(
            7,
            "(r, R) sampler matches the kernel-weighted law in every regime",
            ok,
            f"min KS p-value {min(results):.3f} over {len(results)} tests (level 0.01)",
            t0,
        )
        assert elapsed_ok
        assert ok

    def test_08_power_law_fit(self):
        t0 = time.perf_counter()
        worst = 0.0
        for zeta in (0.254, 0.5329, 0.6076):
            T = np.linspace(200.0, 1200.0, 30)
            data = TransportDataset(T=T, value=17.9 * (T / 300.0) ** (1.0 - zeta / 2.0), kind="viscosity")
            res = fit_power_law(data)
            worst = max(worst, abs(res.zeta - zeta))
        elapsed_ok = time.perf_counter() - t0 < 1.0
        ok = worst < 1e-6 and elapsed_ok
        report(8, "power-law zeta recovery to 1e-6", ok, f"worst abs err {worst:.1e}", t0)
        assert elapsed_ok
        assert ok

    def test_09_bitwise_reproducible_cli(self, tmp_path):
        t0 = time.perf_counter()
        cfg = {
            "units": "nondimensional",
            "species": {"m": 1.0, "alpha": 0.2},
            "kernel": {"zeta": 1.0, "eta": 0.5, "eta_f": 0.5, "omega": 0.7},
            "initial": {"type": "maxwellian", "N": 5000, "T": 1.0, "seed": 91},
            "solver": {"t_end": 0.05, "seed": 92, "record_every": 5},
            "output": {"csv": str(tmp_path / "ts.csv"), "summary": str(tmp_path / "s.json")},
        }
        path = tmp_path / "run.json"
        path.write_text(json.dumps(cfg))
        outputs = []
        for _ in range(2):
            res = subprocess.run(
                [sys.executable, "-m", "polykin.cli", "simulate", str(path), "--threads", "1"],
                capture_output=True,
                text=True,
                timeout=300,
            )
            assert res.returncode == 0, res.stderr
            outputs.append((tmp_path / "ts.csv").read_bytes())
        ok = outputs[0] == outputs[1]
        report(9, "same-seed single-threaded runs emit byte-identical CSV", ok, f"{len(outputs[0])} bytes", t0)
        assert ok
