"""Post-collision state construction and exact (sigma, r, R) sampling.

Exchange collisions repartition the pair energy E between translation and
the two internal energies through (r, R); frozen collisions rotate the
relative velocity and leave the internal energies untouched. The gain-side
density over (sigma, r, R) is proportional to kernel * angular * d_alpha;
for the default kernel it is sampled exactly by composition over the three
kernel terms, each of which factorizes into Beta laws.

The ratio factor (I I* / I' I'*)^alpha appearing in the strong-form
operator is never evaluated: the particle method represents the
distribution against dv dI, so the gain term is realized through the weak
form in which only kernel * angular * d_alpha appears.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernel import KernelParams, PairState, pair_rate_frozen, pair_rate_physical

__all__ = [
    "CollisionOutcome",
    "apply_exchange_collision",
    "apply_frozen_collision",
    "sample_exchange_parameters",
    "collide",
    "orthonormal_basis",
    "unit_from_angles",
]


@dataclass(frozen=True)
class CollisionOutcome:
    """Post-collision states plus the sampled collision parameters."""

    v: np.ndarray
    v_star: np.ndarray
    I: np.ndarray
    I_star: np.ndarray
    sigma: np.ndarray | None
    r: float | np.ndarray | None
    R: float | np.ndarray | None
    frozen: bool


def _check_unit(sigma):
    sigma = np.asarray(sigma, dtype=float)
    norm2 = np.sum(sigma * sigma, axis=-1)
    if np.any(np.abs(norm2 - 1.0) > 1e-9):
        raise ValueError("sigma must be a unit vector")
    return sigma


def orthonormal_basis(uhat):
    """Two unit vectors completing ``uhat`` to a right-handed frame."""
    uhat = np.asarray(uhat, dtype=float)
    a = np.array([0.0, 0.0, 1.0]) if abs(uhat[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(uhat, a)
    e1 /= math.sqrt(e1 @ e1)
    e2 = np.cross(uhat, e1)
    return e1, e2


def unit_from_angles(uhat, z, phi):
    """Unit vector with cosine ``z`` relative to ``uhat`` and azimuth ``phi``."""
    e1, e2 = orthonormal_basis(uhat)
    s = math.sqrt(max(1.0 - z * z, 0.0))
    return z * np.asarray(uhat, dtype=float) + s * (math.cos(phi) * e1 + math.sin(phi) * e2)


def apply_exchange_collision(p: PairState, sigma, r, R, m: float) -> CollisionOutcome:
    """Borgnakke-Larsen exchange: v' = V +- sqrt(RE/m) sigma, I' = r(1-R)E.

    Conserves momentum and total energy to floating-point accuracy by
    construction. Accepts arrays of pairs with matching (N, 3) sigmas.
    """
    sigma = _check_unit(sigma)
    r = np.asarray(r, dtype=float)
    R = np.asarray(R, dtype=float)
    if np.any((r < 0) | (r > 1)) or np.any((R < 0) | (R > 1)):
        raise ValueError("r and R must lie in [0, 1]")
    E = p.energy(m)
    V = 0.5 * (p.v + p.v_star)
    c = np.sqrt(R * E / m)
    shift = c[..., None] * sigma if np.ndim(E) else c * sigma
    internal = (1.0 - R) * E
    return CollisionOutcome(
        v=V + shift,
        v_star=V - shift,
        I=r * internal,
        I_star=(1.0 - r) * internal,
        sigma=sigma,
        r=r if np.ndim(r) else float(r),
        R=R if np.ndim(R) else float(R),
        frozen=False,
    )


def apply_frozen_collision(p: PairState, sigma, m: float) -> CollisionOutcome:
    """Frozen collision: relative speed rotated onto sigma, I fields untouched."""
    sigma = _check_unit(sigma)
    u = p.u
    speed = np.sqrt(np.sum(u * u, axis=-1))
    V = 0.5 * (p.v + p.v_star)
    shift = 0.5 * (speed[..., None] * sigma if np.ndim(speed) else speed * sigma)
    return CollisionOutcome(
        v=V + shift,
        v_star=V - shift,
        I=p.I.copy(),
        I_star=p.I_star.copy(),
        sigma=sigma,
        r=None,
        R=None,
        frozen=True,
    )


def _sample_sigma(uhat, kp: KernelParams, rng, hemisphere: bool):
    """Angular sample; rejection against ``angular_max`` for a custom b."""
    while True:
        z = rng.random() if hemisphere else 2.0 * rng.random() - 1.0
        phi = 2.0 * math.pi * rng.random()
        if kp.angular is None:
            break
        # user-supplied b is defined on the hemisphere cosine
        if rng.random() * kp.angular_max <= kp.angular(abs(z) if not hemisphere else z):
            break
    return unit_from_angles(uhat, z, phi)


def _uhat_of(p: PairState):
    u = p.u
    norm = math.sqrt(float(u @ u))
    if norm == 0.0:
        # measure-zero degenerate direction; any fixed convention works
        return np.array([0.0, 0.0, 1.0])
    return u / norm


def sample_exchange_parameters(p: PairState, kp: KernelParams, m: float, rng):
    """Exact draw of (sigma, r, R) from the kernel-weighted measure.

    Composition sampling: a kernel term is chosen with probability
    proportional to its closed-form (r, R) integral, then (r, R) follow
    the conjugate Beta laws of that term. sigma is drawn from the angular
    model on the hemisphere around the relative velocity. A pair state
    with (N, 3) velocities yields N independent draws.
    """
    if np.ndim(p.v) == 2:
        return _sample_exchange_parameters_batch(p, kp, m, rng)
    a, z = kp.alpha, kp.zeta
    hz = 0.5 * z
    u = p.u
    u2 = float(u @ u)
    w1 = kp.A_R * u2**hz
    w2 = kp.eta * kp.A_r * (float(p.I) / m) ** hz
    w3 = kp.eta * kp.A_r * (float(p.I_star) / m) ** hz
    total = w1 + w2 + w3
    if total <= 0.0:
        raise ValueError("pair has zero exchange rate; no sample is defined")
    x = rng.random() * total
    if x < w1:
        R = rng.beta((z + 3.0) / 2.0, 2.0 * a + 2.0)
        r = rng.beta(a + 1.0, a + 1.0)
    elif x < w1 + w2:
        r = rng.beta(a + 1.0 + hz, a + 1.0)
        R = rng.beta(1.5, 2.0 * a + 2.0 + hz)
    else:
        r = 1.0 - rng.beta(a + 1.0 + hz, a + 1.0)
        R = rng.beta(1.5, 2.0 * a + 2.0 + hz)
    sigma = _sample_sigma(_uhat_of(p), kp, rng, hemisphere=True)
    return sigma, r, R


def _sample_exchange_parameters_batch(p: PairState, kp: KernelParams, m: float, rng):
    """Vectorized composition sampling for an array of pair states."""
    if kp.angular is not None:
        raise NotImplementedError("batch sampling supports the constant angular model only")
    a, z = kp.alpha, kp.zeta
    hz = 0.5 * z
    n = p.v.shape[0]
    u = p.u
    u2 = np.einsum("ij,ij->i", u, u)
    w1 = kp.A_R * u2**hz
    w2 = kp.eta * kp.A_r * (p.I / m) ** hz
    w3 = kp.eta * kp.A_r * (p.I_star / m) ** hz
    total = w1 + w2 + w3
    if np.any(total <= 0.0):
        raise ValueError("pair has zero exchange rate; no sample is defined")
    x = rng.random(n) * total
    term1 = x < w1
    term3 = x >= w1 + w2
    rb1 = rng.beta(a + 1.0, a + 1.0, size=n)
    rb2 = rng.beta(a + 1.0 + hz, a + 1.0, size=n)
    Rb1 = rng.beta((z + 3.0) / 2.0, 2.0 * a + 2.0, size=n)
    Rb2 = rng.beta(1.5, 2.0 * a + 2.0 + hz, size=n)
    r = np.where(term1, rb1, np.where(term3, 1.0 - rb2, rb2))
    R = np.where(term1, Rb1, Rb2)

    unorm = np.sqrt(u2)
    deg = unorm == 0.0
    uhat = np.where(deg[:, None], [0.0, 0.0, 1.0], u / np.where(deg, 1.0, unorm)[:, None])
    pick = np.abs(uhat[:, 2]) < 0.9
    aux = np.where(pick[:, None], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0])
    e1 = np.cross(uhat, aux)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(uhat, e1)
    zc = rng.random(n)
    phi = 2.0 * math.pi * rng.random(n)
    s = np.sqrt(1.0 - zc * zc)
    sigma = (
        zc[:, None] * uhat
        + (s * np.cos(phi))[:, None] * e1
        + (s * np.sin(phi))[:, None] * e2
    )
    return sigma, r, R


def collide(p: PairState, kp: KernelParams, m: float, rng) -> CollisionOutcome | None:
    """Perform one collision of the convex operator for a single pair.

    Chooses exchange with probability omega*W_ex / (omega*W_ex + (1-omega)*W_fr)
    and frozen otherwise; returns None when both rates vanish.
    """
    w_ex = pair_rate_physical(p, kp, m) if kp.omega > 0.0 else 0.0
    w_fr = pair_rate_frozen(p, kp, m) if kp.omega < 1.0 else 0.0
    total = kp.omega * w_ex + (1.0 - kp.omega) * w_fr
    if total <= 0.0:
        return None
    if rng.random() * total < kp.omega * w_ex:
        sigma, r, R = sample_exchange_parameters(p, kp, m, rng)
        return apply_exchange_collision(p, sigma, r, R, m)
    sigma = _sample_sigma(_uhat_of(p), kp, rng, hemisphere=False)
    return apply_frozen_collision(p, sigma, m)
