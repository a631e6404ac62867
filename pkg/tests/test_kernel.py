import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from polykin.kernel import (
    KernelParams,
    PairState,
    d_alpha_mass,
    d_alpha_weight,
    evaluate_frozen_kernel,
    evaluate_physical_kernel,
    kappa_bounds,
    kappa_ub_closed_form,
    pair_rate_frozen,
    pair_rate_physical,
    rho_q,
    sandwich_bounds,
)


def dalpha_integral(f, alpha, epsrel=1e-10):
    """Adaptive 2D quadrature of f(r, R) against the d_alpha weight."""

    def inner(R):
        val, _ = integrate.quad(
            lambda r: f(r, R) * d_alpha_weight(r, R, alpha), 0.0, 1.0, limit=200, epsrel=epsrel
        )
        return val

    val, _ = integrate.quad(inner, 0.0, 1.0, limit=200, epsrel=epsrel)
    return val


def random_pair(rng, n=None):
    shape = (n, 3) if n else (3,)
    v = rng.standard_normal(shape)
    vs = rng.standard_normal(shape)
    I = rng.gamma(1.0, size=n) if n else float(rng.gamma(1.0))
    Is = rng.gamma(1.0, size=n) if n else float(rng.gamma(1.0))
    return PairState(v=v, v_star=vs, I=I, I_star=Is)


class TestDAlpha:
    @pytest.mark.parametrize("alpha", [-0.5, -0.03, 0.0, 0.5, 2.0])
    def test_mass_against_quadrature(self, alpha):
        assert d_alpha_mass(alpha) == pytest.approx(
            dalpha_integral(lambda r, R: 1.0, alpha), rel=1e-9
        )

    def test_weight_symmetry_in_r(self):
        assert d_alpha_weight(0.3, 0.6, 0.7) == pytest.approx(d_alpha_weight(0.7, 0.6, 0.7), rel=1e-14)

    def test_weight_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            d_alpha_weight(1.2, 0.5, 0.0)


class TestKernelParams:
    def test_n_alpha_at_zero(self):
        # 2 Gamma(7/2) / sqrt(pi) = 15/4
        kp = KernelParams(alpha=0.0, zeta=1.0)
        assert kp.n_alpha == pytest.approx(15.0 / 4.0, rel=1e-14)

    @pytest.mark.parametrize("alpha,zeta", [(0.0, 1.0), (0.5, 0.5), (-0.03, 0.6076), (1.5, 2.0)])
    def test_A_R_against_quadrature(self, alpha, zeta):
        kp = KernelParams(alpha=alpha, zeta=zeta)
        oracle = dalpha_integral(lambda r, R: R ** (zeta / 2.0), alpha)
        assert kp.A_R == pytest.approx(oracle, rel=5e-8)

    @pytest.mark.parametrize("alpha,zeta", [(0.0, 1.0), (0.5, 0.5), (-0.03, 0.6076), (1.5, 2.0)])
    def test_A_r_against_quadrature(self, alpha, zeta):
        kp = KernelParams(alpha=alpha, zeta=zeta)
        oracle = dalpha_integral(lambda r, R: (r * (1.0 - R)) ** (zeta / 2.0), alpha)
        assert kp.A_r == pytest.approx(oracle, rel=5e-8)

    def test_validation(self):
        with pytest.raises(ValueError):
            KernelParams(alpha=-1.0, zeta=1.0)
        with pytest.raises(ValueError):
            KernelParams(alpha=0.0, zeta=0.0)
        with pytest.raises(ValueError):
            KernelParams(alpha=0.0, zeta=2.5)
        with pytest.raises(ValueError):
            KernelParams(alpha=0.0, zeta=1.0, omega=1.5)
        with pytest.raises(ValueError):
            KernelParams(alpha=0.0, zeta=1.0, eta=-0.1)

    def test_custom_angular_mass(self):
        kp = KernelParams(alpha=0.0, zeta=1.0, angular=lambda z: 2.0 * z, angular_max=2.0)
        assert kp.b_l1 == pytest.approx(2.0 * math.pi, rel=1e-10)


class TestKernelEvaluation:
    kp = KernelParams(alpha=0.3, zeta=0.8, K=1.4, eta=0.6, eta_f=0.5)
    m = 1.3

    def test_symmetry_under_pair_swap(self):
        rng = np.random.default_rng(1)
        p = random_pair(rng)
        swapped = PairState(v=p.v_star, v_star=p.v, I=p.I_star, I_star=p.I)
        r, R = 0.3, 0.7
        assert evaluate_physical_kernel(p, r, R, self.kp, self.m) == pytest.approx(
            evaluate_physical_kernel(swapped, 1.0 - r, R, self.kp, self.m), rel=1e-14
        )
        assert evaluate_frozen_kernel(p, self.kp, self.m) == pytest.approx(
            evaluate_frozen_kernel(swapped, self.kp, self.m), rel=1e-14
        )

    def test_frozen_kernel_zero_energy(self):
        p = PairState(v=np.zeros(3), v_star=np.zeros(3), I=0.0, I_star=0.0)
        assert evaluate_frozen_kernel(p, self.kp, self.m) == 0.0

    def test_pair_rate_against_quadrature(self):
        rng = np.random.default_rng(2)
        p = random_pair(rng)
        oracle = 2.0 * math.pi * dalpha_integral(
            lambda r, R: evaluate_physical_kernel(p, r, R, self.kp, self.m), self.kp.alpha
        )
        assert pair_rate_physical(p, self.kp, self.m) == pytest.approx(oracle, rel=1e-8)

    def test_frozen_rate_is_full_sphere(self):
        rng = np.random.default_rng(3)
        p = random_pair(rng)
        assert pair_rate_frozen(p, self.kp, self.m) == pytest.approx(
            4.0 * math.pi * evaluate_frozen_kernel(p, self.kp, self.m), rel=1e-14
        )

    def test_frozen_first_term_below_exchange_scale(self):
        # |u|^(2z)/(4E/m)^(z/2) <= |u|^z because 4E/m >= |u|^2
        rng = np.random.default_rng(4)
        p = random_pair(rng, n=1000)
        kp = KernelParams(alpha=0.3, zeta=0.8, K=1.0)
        u2 = np.einsum("ij,ij->i", p.u, p.u)
        assert np.all(evaluate_frozen_kernel(p, kp, self.m) <= u2 ** (kp.zeta / 2.0) * (1.0 + 1e-12))


class TestSandwich:
    def test_pointwise_sandwich_randomized(self):
        kp = KernelParams(alpha=0.2, zeta=0.9, eta=0.7)
        m = 1.1
        rng = np.random.default_rng(5)
        p = random_pair(rng, n=20_000)
        r = rng.random(20_000)
        R = rng.random(20_000)
        B = evaluate_physical_kernel(p, r, R, kp, m)
        lower, upper = sandwich_bounds(kp, m)
        scale = (p.energy(m) / m) ** (kp.zeta / 2.0)
        assert np.all(B <= upper(r, R) * scale * (1.0 + 1e-12))
        assert np.all(B >= lower(r, R) * scale * (1.0 - 1e-12))

    def test_kappa_ub_quadrature_matches_closed_form(self):
        for kp in (
            KernelParams(alpha=0.0, zeta=1.0, eta=0.5),
            KernelParams(alpha=0.5, zeta=0.5, eta=1.0),
            KernelParams(alpha=-0.03, zeta=0.6, eta=0.2),
        ):
            _, k_ub = kappa_bounds(kp)
            assert k_ub == pytest.approx(kappa_ub_closed_form(kp), rel=1e-8)

    def test_kappa_lb_positive_and_below_ub(self):
        kp = KernelParams(alpha=0.0, zeta=1.0, eta=0.5)
        k_lb, k_ub = kappa_bounds(kp)
        assert 0.0 < k_lb < k_ub

    def test_kappa_lb_monte_carlo_oracle(self):
        # independent check of the kinked lower-envelope integral
        kp = KernelParams(alpha=0.0, zeta=1.0, eta=0.5)
        k_lb, _ = kappa_bounds(kp)
        rng = np.random.default_rng(6)
        n = 2_000_000
        r = rng.random(n)
        R = rng.random(n)
        lower, _ = sandwich_bounds(kp, 1.0)
        mc = 2.0 * math.pi * np.mean(lower(r, R) * d_alpha_weight(r, R, kp.alpha))
        assert k_lb == pytest.approx(mc, rel=5e-3)

    def test_eta_zero_lower_degenerates(self):
        kp = KernelParams(alpha=0.0, zeta=1.0, eta=0.0)
        with pytest.warns(UserWarning):
            k_lb, _ = kappa_bounds(kp)
        assert k_lb == pytest.approx(0.0, abs=1e-12)


class TestRhoQ:
    @staticmethod
    def quad_oracle(alpha, zeta, q, epsrel=1e-11):
        """Nested adaptive quadrature of d_alpha (r^(1+z/2)(1-R))^(-1/q).

        The inner integral uses QAWS with the algebraic endpoint exponents
        of r so the r-singularity is integrated by the weighted rule; the
        outer adaptive pass handles the (1-R) singularity by subdivision.
        """
        pr0 = alpha - (1.0 + zeta / 2.0) / q

        def inner(R):
            c = (1.0 - R) ** (2.0 * alpha + 1.0 - 1.0 / q) * math.sqrt(R)
            val, _ = integrate.quad(lambda r: c, 0.0, 1.0, weight="alg", wvar=(pr0, alpha))
            return val

        val, _ = integrate.quad(inner, 0.0, 1.0, limit=250, epsabs=0.0, epsrel=epsrel)
        return val

    def test_reference_value(self):
        # alpha = 0, zeta = 1, q = 2: B(1/4, 1) B(3/2, 3/2) = 4 * pi/8 = pi/2
        assert rho_q(0.0, 1.0, 2.0) == pytest.approx(math.pi / 2.0, rel=1e-12)

    @pytest.mark.parametrize(
        "alpha,zeta,q",
        [(0.0, 1.0, 2.0), (0.5, 0.5, 1.5), (0.0901, 0.424, 3.0), (-0.03, 0.6076, 5.0), (1.0, 2.0, 4.0)],
    )
    def test_against_quadrature(self, alpha, zeta, q):
        val = rho_q(alpha, zeta, q)
        assert math.isfinite(val)
        assert val == pytest.approx(self.quad_oracle(alpha, zeta, q), rel=1e-8)

    def test_infinite_outside_region(self):
        # q = 1: first Beta argument alpha - zeta/2 <= 0 for alpha <= zeta/2
        assert rho_q(0.0, 1.0, 1.0) == math.inf
        # second argument 2 alpha + 2 - 1/q <= 0
        assert rho_q(-0.9, 1.0, 1.1) == math.inf

    def test_q_below_one_rejected(self):
        with pytest.raises(ValueError):
            rho_q(0.0, 1.0, 0.5)

    @given(q=st.floats(1.01, 50.0))
    def test_decreasing_in_q(self, q):
        # larger q weakens the singular factor, so rho_q decreases toward Z
        v1 = rho_q(0.3, 1.0, q)
        v2 = rho_q(0.3, 1.0, q + 0.5)
        if math.isfinite(v1):
            assert v2 <= v1 * (1.0 + 1e-12)
