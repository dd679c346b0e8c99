"""Pure-numpy fallback for the compiled kernels in ``_kernels.pyx``.

Same call signatures and semantics; vectorized over quadrature nodes with an
outer loop over evaluation points. Reductions run in fixed order so repeated
calls are bit-identical.
"""

import numpy as np


def _blend_weight(t, lo):
    """1 - chi(t): 0 on [0, lo], 1 on [1, inf), smooth in between."""
    out = np.ones_like(t)
    out[t <= lo] = 0.0
    mid = (t > lo) & (t < 1.0)
    s = (t[mid] - lo) / (1.0 - lo)
    g1 = np.exp(-1.0 / s)
    g2 = np.exp(-1.0 / (1.0 - s))
    out[mid] = g1 / (g1 + g2)
    return out


def _bump(s2, cnorm):
    out = np.zeros_like(s2)
    inside = s2 < 1.0
    out[inside] = cnorm * np.exp(-1.0 / (1.0 - s2[inside]))
    return out


def _ray_integrals(d, u0, t2, rho, cnorm, gauss_nodes, gauss_weights, n):
    """Vectorized integral of r^(n-1) phi(y + r d) over {r >= 1} ray-ball chords."""
    rho2 = rho * rho
    b = (u0 * d).sum(axis=1)
    c = (u0 * u0).sum(axis=1) - rho2
    disc = b * b - t2 * c
    vals = np.zeros(len(d))
    ok = (disc > 0.0) & (t2 > 0.0)
    if not ok.any():
        return vals
    sq = np.sqrt(disc[ok])
    rlo = np.maximum((-b[ok] - sq) / t2[ok], 1.0)
    rhi = (-b[ok] + sq) / t2[ok]
    good = rhi > rlo
    idx = np.flatnonzero(ok)[good]
    if idx.size == 0:
        return vals
    rlo = rlo[good]
    rhi = rhi[good]
    mid = 0.5 * (rlo + rhi)
    half = 0.5 * (rhi - rlo)
    r = mid[:, None] + half[:, None] * gauss_nodes[None, :]          # (M, G)
    pts = u0[idx, None, :] + r[:, :, None] * d[idx, None, :]          # (M, G, n)
    s2 = (pts * pts).sum(axis=2) / rho2
    vals[idx] = half * (gauss_weights[None, :] * r ** (n - 1)
                        * _bump(s2, cnorm)).sum(axis=1)
    return vals


def far_field_sum(probes, nodes, wf, center, rho, cnorm,
                  gauss_nodes, gauss_weights, delta, blend_lo, out):
    n = probes.shape[1]
    u0 = nodes - center[None, :]
    for p in range(len(probes)):
        d = probes[p][None, :] - nodes
        t2 = (d * d).sum(axis=1)
        bl = _blend_weight(np.sqrt(t2) / delta[p], blend_lo)
        ray = _ray_integrals(d, u0, t2, rho, cnorm, gauss_nodes, gauss_weights, n)
        out[p] = ((wf * bl * ray)[:, None] * d).sum(axis=0)


def drop_nearest_sum(probes, nodes, wf, center, rho, cnorm,
                     gauss_nodes, gauss_weights, out):
    n = probes.shape[1]
    u0 = nodes - center[None, :]
    for p in range(len(probes)):
        d = probes[p][None, :] - nodes
        t2 = (d * d).sum(axis=1)
        ray = _ray_integrals(d, u0, t2, rho, cnorm, gauss_nodes, gauss_weights, n)
        coef = wf * ray
        coef[np.argmin(t2)] = 0.0
        out[p] = (coef[:, None] * d).sum(axis=0)


def chord_moments(starts, dirs, center, rho, cnorm,
                  gauss_nodes, gauss_weights, kmax, out):
    rho2 = rho * rho
    u0 = starts - center[None, :]
    b = (u0 * dirs).sum(axis=1)
    c = (u0 * u0).sum(axis=1) - rho2
    disc = b * b - c
    out[:] = 0.0
    ok = disc > 0.0
    if not ok.any():
        return
    sq = np.sqrt(disc[ok])
    slo = np.maximum(-b[ok] - sq, 0.0)
    shi = -b[ok] + sq
    good = shi > slo
    idx = np.flatnonzero(ok)[good]
    if idx.size == 0:
        return
    slo = slo[good]
    shi = shi[good]
    mid = 0.5 * (slo + shi)
    half = 0.5 * (shi - slo)
    sg = mid[:, None] + half[:, None] * gauss_nodes[None, :]          # (M, G)
    pts = u0[idx, None, :] + sg[:, :, None] * dirs[idx, None, :]
    s2 = (pts * pts).sum(axis=2) / rho2
    ph = half[:, None] * gauss_weights[None, :] * _bump(s2, cnorm)
    mono = np.ones_like(sg)
    for k in range(kmax + 1):
        out[idx, k] = (ph * mono).sum(axis=1)
        mono = mono * sg
