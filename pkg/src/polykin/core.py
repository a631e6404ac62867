"""Fundamental types, weighted moments and the polyatomic equilibrium state.

A molecule is a velocity/internal-energy pair ``(v, I)`` with ``I >= 0``.
Ensembles are stored as flat numpy arrays (one row per particle) with a
uniform statistical weight ``n / N`` so that empirical moments approximate
the corresponding integrals of the one-particle distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .constants import K_B

__all__ = [
    "Particle",
    "Species",
    "Ensemble",
    "MaxwellianParams",
    "lebesgue_bracket",
    "l1_moment",
    "conserved_totals",
    "maxwellian_density",
    "maxwellian_entropy",
    "maxwellian_bracket_moment",
    "sample_maxwellian",
]


@dataclass(frozen=True)
class Particle:
    """A single molecule: velocity 3-vector [m/s] and internal energy [J]."""

    v: np.ndarray
    I: float

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise ValueError("v must be a finite 3-vector")
        if not (self.I >= 0.0 and math.isfinite(self.I)):
            raise ValueError("internal energy must be finite and >= 0")
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class Species:
    """Molecular mass [kg] and internal-structure exponent (> -1)."""

    m: float
    alpha: float

    def __post_init__(self):
        if not self.m > 0.0:
            raise ValueError(f"molecular mass must be positive, got {self.m}")
        if not self.alpha > -1.0:
            raise ValueError(f"alpha must exceed -1, got {self.alpha}")


@dataclass(frozen=True)
class MaxwellianParams:
    """Equilibrium state: mass density, bulk velocity and temperature."""

    rho: float
    U: np.ndarray
    T: float

    def __post_init__(self):
        if self.rho < 0.0:
            raise ValueError("rho must be >= 0")
        if not self.T > 0.0:
            raise ValueError("temperature must be positive")
        object.__setattr__(self, "U", np.asarray(self.U, dtype=float).reshape(3))


@dataclass
class Ensemble:
    """Particle population representing a number density ``n``.

    ``v`` has shape (N, 3), ``I`` shape (N,). Each particle carries the
    statistical weight ``n / N``. Conserved totals are recorded at
    construction for drift diagnostics. Mutation is reserved for the
    solver (single writer); diagnostics may read concurrently.
    """

    species: Species
    v: np.ndarray
    I: np.ndarray
    n: float
    initial_totals: tuple = field(init=False, repr=False)

    def __post_init__(self):
        self.v = np.ascontiguousarray(self.v, dtype=float)
        self.I = np.ascontiguousarray(self.I, dtype=float)
        if self.v.ndim != 2 or self.v.shape[1] != 3 or self.I.shape != (self.v.shape[0],):
            raise ValueError("v must have shape (N, 3) and I shape (N,)")
        if not self.n > 0.0:
            raise ValueError("number density must be positive")
        if not np.all(np.isfinite(self.v)) or not np.all(np.isfinite(self.I)):
            raise ValueError("particle states must be finite")
        if np.any(self.I < 0.0):
            raise ValueError("internal energies must be >= 0")
        self.initial_totals = conserved_totals(self)

    def __len__(self):
        return self.v.shape[0]

    @property
    def weight(self):
        """Statistical weight per particle, n / N."""
        return self.n / len(self)


def lebesgue_bracket(v, I, m):
    """Weight sqrt(1 + |v|^2/2 + I/m) used by all polynomially weighted norms.

    Accepts a single 3-vector with scalar ``I`` or an (N, 3) array with an
    (N,) array of internal energies.
    """
    v = np.asarray(v, dtype=float)
    I = np.asarray(I, dtype=float)
    if not m > 0.0:
        raise ValueError("mass must be positive")
    if np.any(I < 0.0):
        raise ValueError("internal energy must be >= 0")
    sq = np.sum(v * v, axis=-1)
    return np.sqrt(1.0 + 0.5 * sq + I / m)


def l1_moment(ens: Ensemble, k: float) -> float:
    """Empirical L^1_k moment, (n m / N) * sum_i <v_i, I_i>^k.

    Order k = 0 returns the mass density n*m.
    """
    if k < 0:
        raise ValueError("moment order must be >= 0")
    br = lebesgue_bracket(ens.v, ens.I, ens.species.m)
    return ens.species.m * ens.weight * float(np.sum(br**k))


def conserved_totals(ens: Ensemble):
    """(mass, momentum, energy) totals of the represented gas."""
    m = ens.species.m
    w = ens.weight
    mass = ens.n * m
    momentum = m * w * ens.v.sum(axis=0)
    energy = w * float(np.sum(0.5 * m * np.einsum("ij,ij->i", ens.v, ens.v) + ens.I))
    return mass, momentum, energy


def maxwellian_density(v, I, params: MaxwellianParams, sp: Species, k_B: float = K_B):
    """Equilibrium distribution; integrates to rho/m over (v, I).

    The internal-energy marginal is Gamma(alpha + 1, k_B T), the velocity
    marginal an isotropic Gaussian around the bulk velocity.
    """
    if not params.T > 0.0:
        raise ValueError("temperature must be positive")
    v = np.asarray(v, dtype=float)
    single = v.ndim == 1
    v = np.atleast_2d(v)
    I = np.asarray(I, dtype=float)
    m, alpha = sp.m, sp.alpha
    kT = k_B * params.T
    pref = (
        params.rho
        / (m * kT ** (alpha + 1.0) * special.gamma(alpha + 1.0))
        * (m / (2.0 * math.pi * kT)) ** 1.5
    )
    w2 = np.sum((v - params.U) ** 2, axis=-1)
    out = pref * I**alpha * np.exp(-(0.5 * m * w2 + I) / kT)
    if single and np.ndim(I) == 0:
        return float(out[0])
    return out


def maxwellian_entropy(params: MaxwellianParams, sp: Species, k_B: float = K_B) -> float:
    """Closed form of the entropy functional int M log(M I^-alpha) dv dI.

    Since log(M I^-alpha) = log C - (m|v-U|^2/2 + I)/(k_B T) with C the
    Maxwellian prefactor, the integral is n (log C - (alpha + 5/2)).
    """
    m, alpha = sp.m, sp.alpha
    kT = k_B * params.T
    n = params.rho / m
    logC = (
        math.log(params.rho / m)
        - (alpha + 1.0) * math.log(kT)
        - math.lgamma(alpha + 1.0)
        + 1.5 * math.log(m / (2.0 * math.pi * kT))
    )
    return n * (logC - (alpha + 2.5))


def maxwellian_bracket_moment(
    k: float, T: float, sp: Species, rho: float | None = None, k_B: float = K_B
) -> float:
    """L^1_k moment of a zero-bulk-velocity Maxwellian, by 1D quadrature.

    For U = 0 the squared bracket is 1 + theta*G with theta = k_B T / m and
    G ~ Gamma(alpha + 5/2), which collapses the moment to a single Gamma
    integral. ``rho`` defaults to the unit-mass-density normalization n*m = 1.
    """
    m, alpha = sp.m, sp.alpha
    theta = k_B * T / m
    a = alpha + 2.5
    lg = math.lgamma(a)

    def integrand(g):
        return (1.0 + theta * g) ** (0.5 * k) * math.exp((a - 1.0) * math.log(g) - g - lg)

    val, _ = integrate.quad(integrand, 0.0, np.inf, limit=200)
    mass = rho if rho is not None else 1.0
    return mass * val


def sample_maxwellian(
    params: MaxwellianParams,
    sp: Species,
    N: int,
    rng_seed,
    k_B: float = K_B,
) -> Ensemble:
    """Draw N particles from the Maxwellian; deterministic for a fixed seed.

    Internal energies use the Gamma sampler of numpy's Generator, which is
    exact for any shape alpha + 1 > 0 (shapes below 1 occur physically,
    e.g. hydrogen).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    kT = k_B * params.T
    sigma = math.sqrt(kT / sp.m)
    v = params.U + sigma * rng.standard_normal((N, 3))
    I = rng.gamma(sp.alpha + 1.0, scale=kT, size=N)
    n = params.rho / sp.m
    return Ensemble(species=sp, v=v, I=I, n=n)
