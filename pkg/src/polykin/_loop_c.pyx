# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled collision inner loop.

Bit-for-bit mirror of ``_loop_py.collision_pass``; both consume the same
pre-drawn random numbers, so the backends are interchangeable. Keep in
sync with the pure-Python source when touching the arithmetic.
"""

from libc.math cimport pow, sqrt


def collision_pass(
    double[:, ::1] v,
    double[::1] I,
    long long[::1] ii,
    long long[::1] jj,
    double[::1] u_acc,
    double[::1] u_type,
    double[::1] u_term,
    double[::1] zu,
    double[::1] cphi,
    double[::1] sphi,
    double[::1] r1,
    double[::1] R1,
    double[::1] r2,
    double[::1] R2,
    double m,
    double zeta,
    double eta,
    double eta_f,
    double omega,
    double two_pi_kn,
    double four_pi_k,
    double A_R,
    double A_r,
    double wmaj,
):
    cdef Py_ssize_t ncand = ii.shape[0]
    cdef Py_ssize_t k
    cdef long long i, j
    cdef double half_z = 0.5 * zeta
    cdef double inv_m = 1.0 / m
    cdef long long accepted = 0, nex = 0, nfr = 0
    cdef int status = 0
    cdef double ux, uy, uz, u2, Ii, Ij, E
    cdef double w1, w2, w3, wex, wfr, w
    cdef double Vx, Vy, Vz, inv_un, hx, hy, hz_
    cdef double wt, x, r, R, z
    cdef double ax, ay, az, e1x, e1y, e1z, inv_e1, e2x, e2y, e2z
    cdef double st, cp, sp, sx, sy, sz, c0, internal
    cdef bint exchange

    for k in range(ncand):
        i = ii[k]
        j = jj[k]
        ux = v[i, 0] - v[j, 0]
        uy = v[i, 1] - v[j, 1]
        uz = v[i, 2] - v[j, 2]
        u2 = ux * ux + uy * uy + uz * uz
        Ii = I[i]
        Ij = I[j]
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

        Vx = 0.5 * (v[i, 0] + v[j, 0])
        Vy = 0.5 * (v[i, 1] + v[j, 1])
        Vz = 0.5 * (v[i, 2] + v[j, 2])

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
            z = zu[k]
        else:
            z = 2.0 * zu[k] - 1.0
            r = 0.0
            R = 0.0

        if -0.9 < hz_ < 0.9:
            ax = 0.0
            ay = 0.0
            az = 1.0
        else:
            ax = 1.0
            ay = 0.0
            az = 0.0
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
            I[i] = r * internal
            I[j] = (1.0 - r) * internal
            nex += 1
        else:
            c0 = 0.5 * sqrt(u2)
            nfr += 1

        v[i, 0] = Vx + c0 * sx
        v[i, 1] = Vy + c0 * sy
        v[i, 2] = Vz + c0 * sz
        v[j, 0] = Vx - c0 * sx
        v[j, 1] = Vy - c0 * sy
        v[j, 2] = Vz - c0 * sz

    return int(accepted), int(nex), int(nfr), status
