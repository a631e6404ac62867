"""Pure-Python collision inner loop (fallback backend).

Mirrors ``_loop_c.pyx`` operation for operation so that both backends
consume the same pre-drawn random numbers and produce bit-identical
trajectories. Keep the two files in sync: any change to the arithmetic
here must be replicated in the Cython source.

All random variates are drawn by the caller: per candidate one uniform
each for acceptance, collision-type choice, kernel-term choice and the
angular cosine, the precomputed cosine/sine of the azimuth, plus Beta
variates for both (r, R) term laws. The azimuth trigonometry is done by
the caller because compilers may fuse cos/sin pairs into sincos, whose
results can differ from the separate calls by one ulp.
"""

from __future__ import annotations

from math import pow, sqrt

__all__ = ["collision_pass"]


def collision_pass(
    v,
    I,
    ii,
    jj,
    u_acc,
    u_type,
    u_term,
    zu,
    cphi,
    sphi,
    r1,
    R1,
    r2,
    R2,
    m,
    zeta,
    eta,
    eta_f,
    omega,
    two_pi_kn,
    four_pi_k,
    A_R,
    A_r,
    wmaj,
):
    """Process all candidate pairs of one time step, mutating v and I.

    Returns (accepted, n_exchange, n_frozen, status) with status 1 when a
    per-pair rate exceeded the majorant (stale majorant; the caller must
    abort the run rather than continue with a biased acceptance step).
    """
    n = v.shape[0]
    vx = v[:, 0].tolist()
    vy = v[:, 1].tolist()
    vz = v[:, 2].tolist()
    Il = I.tolist()
    ncand = len(ii)
    half_z = 0.5 * zeta
    inv_m = 1.0 / m
    accepted = 0
    nex = 0
    nfr = 0
    status = 0

    for k in range(ncand):
        i = ii[k]
        j = jj[k]
        ux = vx[i] - vx[j]
        uy = vy[i] - vy[j]
        uz = vz[i] - vz[j]
        u2 = ux * ux + uy * uy + uz * uz
        Ii = Il[i]
        Ij = Il[j]
        E = 0.25 * m * u2 + Ii + Ij

        w1 = A_R * pow(u2, half_z)
        w2 = eta * A_r * pow(Ii * inv_m, half_z)
        w3 = eta * A_r * pow(Ij * inv_m, half_z)
        wex = two_pi_kn * (w1 + w2 + w3)

        if E > 0.0:
            wfr = four_pi_k * (
                pow(u2, zeta) / pow(4.0 * E * inv_m, half_z)
                + eta_f * (pow(Ii, zeta) + pow(Ij, zeta)) / pow(m * E, half_z)
            )
        else:
            wfr = 0.0

        w = omega * wex + (1.0 - omega) * wfr
        if w > wmaj:
            status = 1
            break
        if u_acc[k] * wmaj >= w:
            continue
        accepted += 1

        Vx = 0.5 * (vx[i] + vx[j])
        Vy = 0.5 * (vy[i] + vy[j])
        Vz = 0.5 * (vz[i] + vz[j])

        # direction of the relative velocity; fixed convention when u = 0
        if u2 > 0.0:
            inv_un = 1.0 / sqrt(u2)
            hx = ux * inv_un
            hy = uy * inv_un
            hz_ = uz * inv_un
        else:
            hx = 0.0
            hy = 0.0
            hz_ = 1.0

        exchange = u_type[k] * w < omega * wex
        if exchange:
            wt = w1 + w2 + w3
            x = u_term[k] * wt
            if x < w1:
                r = r1[k]
                R = R1[k]
            elif x < w1 + w2:
                r = r2[k]
                R = R2[k]
            else:
                r = 1.0 - r2[k]
                R = R2[k]
            z = zu[k]  # hemisphere: cosine uniform on [0, 1]
        else:
            z = 2.0 * zu[k] - 1.0  # full sphere
            r = 0.0
            R = 0.0

        # orthonormal frame around (hx, hy, hz_)
        if -0.9 < hz_ < 0.9:
            ax, ay, az = 0.0, 0.0, 1.0
        else:
            ax, ay, az = 1.0, 0.0, 0.0
        e1x = hy * az - hz_ * ay
        e1y = hz_ * ax - hx * az
        e1z = hx * ay - hy * ax
        inv_e1 = 1.0 / sqrt(e1x * e1x + e1y * e1y + e1z * e1z)
        e1x *= inv_e1
        e1y *= inv_e1
        e1z *= inv_e1
        e2x = hy * e1z - hz_ * e1y
        e2y = hz_ * e1x - hx * e1z
        e2z = hx * e1y - hy * e1x

        st = sqrt(1.0 - z * z) if z * z < 1.0 else 0.0
        cp = cphi[k]
        sp = sphi[k]
        sx = z * hx + st * (cp * e1x + sp * e2x)
        sy = z * hy + st * (cp * e1y + sp * e2y)
        sz = z * hz_ + st * (cp * e1z + sp * e2z)

        if exchange:
            c0 = sqrt(R * E * inv_m)
            internal = (1.0 - R) * E
            Il[i] = r * internal
            Il[j] = (1.0 - r) * internal
            nex += 1
        else:
            c0 = 0.5 * sqrt(u2)
            nfr += 1

        vx[i] = Vx + c0 * sx
        vy[i] = Vy + c0 * sy
        vz[i] = Vz + c0 * sz
        vx[j] = Vx - c0 * sx
        vy[j] = Vy - c0 * sy
        vz[j] = Vz - c0 * sz

    for idx in range(n):
        v[idx, 0] = vx[idx]
        v[idx, 1] = vy[idx]
        v[idx, 2] = vz[idx]
        I[idx] = Il[idx]

    return accepted, nex, nfr, status
