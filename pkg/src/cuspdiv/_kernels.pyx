# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: far-field accumulation of the divergence right-inverse
and chord moments of the unit-mass bump along rays.

Semantics must stay in lockstep with ``_kernels_py`` (the numpy fallback);
``tests/test_backends.py`` enforces agreement.
"""

from libc.math cimport exp, sqrt

DEF MAXDIM = 8


cdef inline double blend_weight(double t, double lo) nogil:
    """1 - chi(t): 0 on [0, lo], 1 on [1, inf), smooth in between."""
    cdef double s, g1, g2
    if t <= lo:
        return 0.0
    if t >= 1.0:
        return 1.0
    s = (t - lo) / (1.0 - lo)
    g1 = exp(-1.0 / s)
    g2 = exp(-1.0 / (1.0 - s))
    return g1 / (g1 + g2)


cdef inline double bump_value(double s2, double cnorm) nogil:
    if s2 >= 1.0:
        return 0.0
    return cnorm * exp(-1.0 / (1.0 - s2))


def far_field_sum(double[:, ::1] probes, double[:, ::1] nodes, double[::1] wf,
                  double[::1] center, double rho, double cnorm,
                  double[::1] gauss_nodes, double[::1] gauss_weights,
                  double[::1] delta, double blend_lo, double[:, ::1] out):
    """out[p] = sum_j wf[j] * b_j * I(x_p, y_j) * (x_p - y_j).

    I is the ray integral of r^(n-1) * phi(y + r (x - y)) over the r-interval
    where the ray meets the bump ball, intersected with r >= 1; b_j blends the
    contribution smoothly to zero for |x_p - y_j| <= blend_lo * delta[p].
    """
    cdef Py_ssize_t np_ = probes.shape[0], nn = nodes.shape[0]
    cdef int n = probes.shape[1], ng = gauss_nodes.shape[0]
    cdef Py_ssize_t p, j
    cdef int i, g
    cdef double d[MAXDIM]
    cdef double u0[MAXDIM]
    cdef double acc[MAXDIM]
    cdef double rho2 = rho * rho
    cdef double t2, b, c, disc, sq, rlo, rhi, mid, half, r, s2, q, bl, dist, ww, pw

    if n > MAXDIM:
        raise ValueError("dimension exceeds compiled kernel limit")

    with nogil:
        for p in range(np_):
            for i in range(n):
                acc[i] = 0.0
            for j in range(nn):
                t2 = 0.0
                for i in range(n):
                    d[i] = probes[p, i] - nodes[j, i]
                    t2 += d[i] * d[i]
                if t2 == 0.0:
                    continue
                dist = sqrt(t2)
                bl = blend_weight(dist / delta[p], blend_lo)
                if bl == 0.0:
                    continue
                b = 0.0
                c = -rho2
                for i in range(n):
                    u0[i] = nodes[j, i] - center[i]
                    b += u0[i] * d[i]
                    c += u0[i] * u0[i]
                disc = b * b - t2 * c
                if disc <= 0.0:
                    continue
                sq = sqrt(disc)
                rlo = (-b - sq) / t2
                rhi = (-b + sq) / t2
                if rlo < 1.0:
                    rlo = 1.0
                if rhi <= rlo:
                    continue
                mid = 0.5 * (rlo + rhi)
                half = 0.5 * (rhi - rlo)
                q = 0.0
                for g in range(ng):
                    r = mid + half * gauss_nodes[g]
                    s2 = 0.0
                    for i in range(n):
                        pw = u0[i] + r * d[i]
                        s2 += pw * pw
                    s2 /= rho2
                    if s2 < 1.0:
                        ww = r
                        for i in range(n - 2):
                            ww *= r
                        q += gauss_weights[g] * ww * bump_value(s2, cnorm)
                q *= half
                if q == 0.0:
                    continue
                ww = wf[j] * bl * q
                for i in range(n):
                    acc[i] += ww * d[i]
            for i in range(n):
                out[p, i] = acc[i]


def drop_nearest_sum(double[:, ::1] probes, double[:, ::1] nodes, double[::1] wf,
                     double[::1] center, double rho, double cnorm,
                     double[::1] gauss_nodes, double[::1] gauss_weights,
                     double[:, ::1] out):
    """Far-field sum over all nodes except the one nearest to each probe."""
    cdef Py_ssize_t np_ = probes.shape[0], nn = nodes.shape[0]
    cdef int n = probes.shape[1], ng = gauss_nodes.shape[0]
    cdef Py_ssize_t p, j, jmin
    cdef int i, g
    cdef double d[MAXDIM]
    cdef double u0[MAXDIM]
    cdef double acc[MAXDIM]
    cdef double rho2 = rho * rho
    cdef double t2, b, c, disc, sq, rlo, rhi, mid, half, r, s2, q, best, ww, pw

    if n > MAXDIM:
        raise ValueError("dimension exceeds compiled kernel limit")

    with nogil:
        for p in range(np_):
            jmin = 0
            best = 1e300
            for j in range(nn):
                t2 = 0.0
                for i in range(n):
                    pw = probes[p, i] - nodes[j, i]
                    t2 += pw * pw
                if t2 < best:
                    best = t2
                    jmin = j
            for i in range(n):
                acc[i] = 0.0
            for j in range(nn):
                if j == jmin:
                    continue
                t2 = 0.0
                for i in range(n):
                    d[i] = probes[p, i] - nodes[j, i]
                    t2 += d[i] * d[i]
                if t2 == 0.0:
                    continue
                b = 0.0
                c = -rho2
                for i in range(n):
                    u0[i] = nodes[j, i] - center[i]
                    b += u0[i] * d[i]
                    c += u0[i] * u0[i]
                disc = b * b - t2 * c
                if disc <= 0.0:
                    continue
                sq = sqrt(disc)
                rlo = (-b - sq) / t2
                rhi = (-b + sq) / t2
                if rlo < 1.0:
                    rlo = 1.0
                if rhi <= rlo:
                    continue
                mid = 0.5 * (rlo + rhi)
                half = 0.5 * (rhi - rlo)
                q = 0.0
                for g in range(ng):
                    r = mid + half * gauss_nodes[g]
                    s2 = 0.0
                    for i in range(n):
                        pw = u0[i] + r * d[i]
                        s2 += pw * pw
                    s2 /= rho2
                    if s2 < 1.0:
                        ww = r
                        for i in range(n - 2):
                            ww *= r
                        q += gauss_weights[g] * ww * bump_value(s2, cnorm)
                q *= half
                ww = wf[j] * q
                for i in range(n):
                    acc[i] += ww * d[i]
            for i in range(n):
                out[p, i] = acc[i]


def chord_moments(double[:, ::1] starts, double[:, ::1] dirs,
                  double[::1] center, double rho, double cnorm,
                  double[::1] gauss_nodes, double[::1] gauss_weights,
                  int kmax, double[:, ::1] out):
    """out[t, k] = integral over sigma >= 0 of sigma^k phi(start + sigma dir).

    dirs must be unit vectors; the integral is restricted to the chord where
    the ray meets the bump ball.
    """
    cdef Py_ssize_t nt = starts.shape[0]
    cdef int n = starts.shape[1], ng = gauss_nodes.shape[0]
    cdef Py_ssize_t t
    cdef int i, g, k
    cdef double u0[MAXDIM]
    cdef double rho2 = rho * rho
    cdef double b, c, disc, sq, slo, shi, mid, half, sg, s2, ph, pw, mono

    if n > MAXDIM:
        raise ValueError("dimension exceeds compiled kernel limit")

    with nogil:
        for t in range(nt):
            for k in range(kmax + 1):
                out[t, k] = 0.0
            b = 0.0
            c = -rho2
            for i in range(n):
                u0[i] = starts[t, i] - center[i]
                b += u0[i] * dirs[t, i]
                c += u0[i] * u0[i]
            disc = b * b - c
            if disc <= 0.0:
                continue
            sq = sqrt(disc)
            slo = -b - sq
            shi = -b + sq
            if slo < 0.0:
                slo = 0.0
            if shi <= slo:
                continue
            mid = 0.5 * (slo + shi)
            half = 0.5 * (shi - slo)
            for g in range(ng):
                sg = mid + half * gauss_nodes[g]
                s2 = 0.0
                for i in range(n):
                    pw = u0[i] + sg * dirs[t, i]
                    s2 += pw * pw
                s2 /= rho2
                if s2 >= 1.0:
                    continue
                ph = half * gauss_weights[g] * bump_value(s2, cnorm)
                mono = 1.0
                for k in range(kmax + 1):
                    out[t, k] += ph * mono
                    mono *= sg
