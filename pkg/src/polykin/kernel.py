"""Collision kernels, the (r, R) weight, and closed-form kernel integrals.

The exchange kernel factorizes into an angular part (constant on the
hemisphere by default) and a part depending on the pair state and the
energy-exchange variables (r, R). Closed forms below reduce to products of
Beta functions; every one of them is cross-checked against quadrature in
the test suite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

__all__ = [
    "KernelParams",
    "PairState",
    "d_alpha_weight",
    "d_alpha_mass",
    "evaluate_physical_kernel",
    "evaluate_frozen_kernel",
    "pair_rate_physical",
    "pair_rate_frozen",
    "sandwich_bounds",
    "kappa_bounds",
    "kappa_ub_closed_form",
    "rho_q",
]


def _beta(a, b):
    return special.beta(a, b)


@dataclass(frozen=True)
class KernelParams:
    """All collision-kernel parameters plus precomputed rate constants.

    ``angular`` is an optional bounded density b(cos) on [0, 1]; ``None``
    selects the default b == 1 on the hemisphere. ``angular_max`` must
    bound b for rejection sampling. Instances are immutable; the derived
    constants are cached at construction.
    """

    alpha: float
    zeta: float
    K: float = 1.0
    eta: float = 0.0
    eta_f: float = 0.0
    omega: float = 1.0
    angular: Optional[Callable[[float], float]] = None
    angular_max: float = 1.0

    # cached derived constants
    n_alpha: float = field(init=False, repr=False)
    A_R: float = field(init=False, repr=False)
    A_r: float = field(init=False, repr=False)
    d_alpha_total: float = field(init=False, repr=False)
    b_l1: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.alpha > -1.0:
            raise ValueError("alpha must exceed -1")
        if not 0.0 < self.zeta <= 2.0:
            raise ValueError("zeta must lie in (0, 2]")
        if not self.K > 0.0:
            raise ValueError("K must be positive")
        if self.eta < 0.0 or self.eta_f < 0.0:
            raise ValueError("eta and eta_f must be >= 0")
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError("omega must lie in [0, 1]")
        a, z = self.alpha, self.zeta
        n_alpha = 2.0 * special.gamma(2.0 * a + 3.5) / (math.sqrt(math.pi) * special.gamma(a + 1.0) ** 2)
        object.__setattr__(self, "n_alpha", n_alpha)
        object.__setattr__(self, "A_R", _beta(a + 1.0, a + 1.0) * _beta((z + 3.0) / 2.0, 2.0 * a + 2.0))
        object.__setattr__(self, "A_r", _beta(a + 1.0 + z / 2.0, a + 1.0) * _beta(1.5, 2.0 * a + 2.0 + z / 2.0))
        object.__setattr__(self, "d_alpha_total", d_alpha_mass(a))
        if self.angular is None:
            b_l1 = 2.0 * math.pi
        else:
            val, _ = integrate.quad(self.angular, 0.0, 1.0, limit=200)
            b_l1 = 2.0 * math.pi * val
        object.__setattr__(self, "b_l1", b_l1)


@dataclass(frozen=True)
class PairState:
    """Pre-collision pair; accepts scalars or matching arrays."""

    v: np.ndarray
    v_star: np.ndarray
    I: np.ndarray
    I_star: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "v_star", np.asarray(self.v_star, dtype=float))
        object.__setattr__(self, "I", np.asarray(self.I, dtype=float))
        object.__setattr__(self, "I_star", np.asarray(self.I_star, dtype=float))
        if np.any(self.I < 0.0) or np.any(self.I_star < 0.0):
            raise ValueError("internal energies must be >= 0")

    @property
    def u(self):
        return self.v - self.v_star

    def energy(self, m: float):
        """Collision energy m|u|^2/4 + I + I_star."""
        u = self.u
        return 0.25 * m * np.sum(u * u, axis=-1) + self.I + self.I_star


def d_alpha_weight(r, R, alpha):
    """Energy-repartition weight r^a (1-r)^a (1-R)^(2a+1) sqrt(R)."""
    r = np.asarray(r, dtype=float)
    R = np.asarray(R, dtype=float)
    if np.any((r < 0) | (r > 1)) or np.any((R < 0) | (R > 1)):
        raise ValueError("r and R must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        out = (r * (1.0 - r)) ** alpha * (1.0 - R) ** (2.0 * alpha + 1.0) * np.sqrt(R)
    return out if out.ndim else float(out)


def d_alpha_mass(alpha: float) -> float:
    """Total mass of the (r, R) weight: B(a+1, a+1) B(3/2, 2a+2)."""
    return _beta(alpha + 1.0, alpha + 1.0) * _beta(1.5, 2.0 * alpha + 2.0)


def evaluate_physical_kernel(p: PairState, r, R, kp: KernelParams, m: float):
    """Exchange collision kernel (without the angular factor).

    K N_a [R^(z/2) |u|^z + eta (r(1-R) I/m)^(z/2) + eta ((1-r)(1-R) I*/m)^(z/2)];
    symmetric under (v, I, r) <-> (v_star, I_star, 1-r).
    """
    r = np.asarray(r, dtype=float)
    R = np.asarray(R, dtype=float)
    hz = 0.5 * kp.zeta
    u = p.u
    u2 = np.sum(u * u, axis=-1)
    val = R**hz * u2**hz
    val = val + kp.eta * (r * (1.0 - R) * p.I / m) ** hz
    val = val + kp.eta * ((1.0 - r) * (1.0 - R) * p.I_star / m) ** hz
    out = kp.K * kp.n_alpha * val
    return out if np.ndim(out) else float(out)


def evaluate_frozen_kernel(p: PairState, kp: KernelParams, m: float):
    """Frozen collision kernel K [|u|^(2z)/(4E/m)^(z/2) + eta_f (I^z + I*^z)/(mE)^(z/2)].

    At E = 0 both numerators vanish at least as fast as the denominators
    (|u|^(2z)/|u|^z -> 0 by continuity), so the kernel is defined as 0 there.
    """
    hz = 0.5 * kp.zeta
    u = p.u
    u2 = np.sum(u * u, axis=-1)
    E = p.energy(m)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(
            E > 0.0,
            kp.K
            * (
                u2**kp.zeta / np.where(E > 0.0, 4.0 * E / m, 1.0) ** hz
                + kp.eta_f
                * (p.I**kp.zeta + p.I_star**kp.zeta)
                / np.where(E > 0.0, m * E, 1.0) ** hz
            ),
            0.0,
        )
    return out if np.ndim(out) else float(out)


def pair_rate_physical(p: PairState, kp: KernelParams, m: float):
    """Total exchange rate for a pair: the kernel integrated over (sigma, r, R).

    Closed form for the default constant angular model,
    ||b||_L1 [ N_a K (|u|^z A_R + eta (I/m)^(z/2) A_r + eta (I*/m)^(z/2) A_r) ].
    """
    if kp.angular is not None:
        raise NotImplementedError("closed-form pair rate requires the constant angular model")
    hz = 0.5 * kp.zeta
    u = p.u
    u2 = np.sum(u * u, axis=-1)
    out = (
        2.0
        * math.pi
        * kp.K
        * kp.n_alpha
        * (
            u2**hz * kp.A_R
            + kp.eta * kp.A_r * ((p.I / m) ** hz + (p.I_star / m) ** hz)
        )
    )
    return out if np.ndim(out) else float(out)


def pair_rate_frozen(p: PairState, kp: KernelParams, m: float):
    """Frozen rate: the sigma-independent frozen kernel times the full sphere."""
    out = 4.0 * math.pi * evaluate_frozen_kernel(p, kp, m)
    return out if np.ndim(out) else float(out)


def sandwich_bounds(kp: KernelParams, m: float):
    """Evaluable (r, R) envelopes sandwiching the exchange kernel.

    Returns (lower, upper) with
    lower(r, R) (E/m)^(z/2) <= B <= upper(r, R) (E/m)^(z/2) pointwise.
    The lower envelope follows from max(m|u|^2/4, I, I*) >= E/3 and is
    nontrivial only for eta > 0.
    """
    hz = 0.5 * kp.zeta
    pref = kp.K * kp.n_alpha

    def upper(r, R):
        r = np.asarray(r, dtype=float)
        R = np.asarray(R, dtype=float)
        return pref * (
            (4.0 * R) ** hz
            + kp.eta * (r * (1.0 - R)) ** hz
            + kp.eta * ((1.0 - r) * (1.0 - R)) ** hz
        )

    scale = 3.0**-hz

    def lower(r, R):
        r = np.asarray(r, dtype=float)
        R = np.asarray(R, dtype=float)
        terms = np.stack(
            [
                (4.0 * R) ** hz,
                kp.eta * (r * (1.0 - R)) ** hz,
                kp.eta * ((1.0 - r) * (1.0 - R)) ** hz,
            ]
        )
        return pref * scale * terms.min(axis=0)

    return lower, upper


def kappa_bounds(kp: KernelParams, m: float = 1.0, tilde_b=None):
    """(kappa_lb, kappa_ub): angular mass times the (r, R)-integrated envelopes.

    Computed by nested adaptive quadrature against the d_alpha weight; pass
    ``tilde_b = (lower, upper)`` to integrate custom envelope functions.
    For the default lower envelope (a min of three terms) the inner
    integral is split at the kink locations so the quadrature converges.
    """
    default = tilde_b is None
    a = kp.alpha
    hz = 0.5 * kp.zeta

    def weight(r, R):
        return (r * (1.0 - r)) ** a * (1.0 - R) ** (2.0 * a + 1.0) * math.sqrt(R)

    if default:
        # scalar fast paths; keep in sync with sandwich_bounds
        pref = kp.K * kp.n_alpha
        eta = kp.eta

        def upper(r, R):
            return pref * (
                (4.0 * R) ** hz
                + eta * (r * (1.0 - R)) ** hz
                + eta * ((1.0 - r) * (1.0 - R)) ** hz
            )

        scale = 3.0**-hz

        def lower(r, R):
            return pref * scale * min(
                (4.0 * R) ** hz,
                eta * (r * (1.0 - R)) ** hz,
                eta * ((1.0 - r) * (1.0 - R)) ** hz,
            )

        def default_lower_breaks(R):
            # kinks of min((4R)^hz, eta (r(1-R))^hz, eta ((1-r)(1-R))^hz) in r
            breaks = [0.5]
            if eta > 0.0 and R < 1.0:
                r_cross = 4.0 * R / (eta ** (1.0 / hz) * (1.0 - R))
                if 0.0 < r_cross < 1.0:
                    breaks += [r_cross, 1.0 - r_cross]
            return sorted(b for b in breaks if 0.0 < b < 1.0)

    else:
        lo_f, up_f = tilde_b

        def lower(r, R):
            return float(lo_f(r, R))

        def upper(r, R):
            return float(up_f(r, R))

        default_lower_breaks = None

    def integral(f, breaks_of=None):
        def inner(R):
            pts = breaks_of(R) if breaks_of is not None else None
            val, _ = integrate.quad(
                lambda r: f(r, R) * weight(r, R),
                0.0,
                1.0,
                points=pts,
                limit=100,
                epsabs=1e-12,
                epsrel=1e-10,
            )
            return val

        val, _ = integrate.quad(inner, 0.0, 1.0, limit=200, epsabs=1e-12, epsrel=1e-10)
        return kp.b_l1 * val

    k_lb = integral(lower, default_lower_breaks)
    k_ub = integral(upper)
    if kp.eta == 0.0 and tilde_b is None:
        warnings.warn("eta = 0: the lower sandwich degenerates, kappa_lb = 0", stacklevel=2)
    return k_lb, k_ub


def kappa_ub_closed_form(kp: KernelParams) -> float:
    """Beta-function closed form of kappa_ub for the default envelopes."""
    z = kp.zeta
    return kp.b_l1 * kp.K * kp.n_alpha * (2.0**z * kp.A_R + 2.0 * kp.eta * kp.A_r)


def rho_q(alpha: float, zeta: float, q: float) -> float:
    """Integrability constant controlling the admissible L^p range.

    With the normalized envelope (upper == 1),
    rho_q = B(a+1 - (1+z/2)/q, a+1) B(3/2, 2a+2 - 1/q)
    whenever both Beta arguments are positive; +inf otherwise.
    """
    if q < 1.0:
        raise ValueError("q must be >= 1")
    a1 = alpha + 1.0 - (1.0 + zeta / 2.0) / q
    a2 = 2.0 * alpha + 2.0 - 1.0 / q
    if a1 <= 0.0 or a2 <= 0.0:
        return math.inf
    return float(_beta(a1, alpha + 1.0) * _beta(1.5, a2))
