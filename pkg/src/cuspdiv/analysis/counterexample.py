"""The quadratic-cusp pressure counterexample suite (gamma = 2, k = 1, m = 0).

The pressure q(x, y) = 1/x^2 - c* (c* the mean-normalizing constant) has a
gradient in H^-1 but lies outside L^2 of the domain: its truncated square
integral diverges like 2/eps while the |x|^2-weighted norm stays finite.
This is what rules out uniform unweighted inf-sup constants and motivates
the weighted pressure space. The suite also checks the weak-derivative
identity behind "grad q in H^-1" and the L^r integrability threshold of the
well-posedness corollary.
"""

import numpy as np

from ..fields import ScalarField, bump_field
from ..geometry import CuspDomain
from ..quadrature import ParameterError, integrate, make_rule, project_mean_zero


def lr_exponent_threshold(gamma, k):
    """r_0 = 2 - 4(gamma - 1) / (gamma (k + 2) - 1): pressures of the weighted
    theory land in L^r for every r < r_0."""
    return 2.0 - 4.0 * (gamma - 1.0) / (gamma * (k + 2.0) - 1.0)


def _support_box_rule(sup, order):
    """Tensor Gauss rule on the bounding box of a compact support; the global
    graded rule underresolves the spiky bump-derivative integrands."""
    lo, hi = sup.bounding_box()
    g, w = np.polynomial.legendre.leggauss(order)
    xs = 0.5 * (hi[0] + lo[0]) + 0.5 * (hi[0] - lo[0]) * g
    ys = 0.5 * (hi[1] + lo[1]) + 0.5 * (hi[1] - lo[1]) * g
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    W = np.outer(0.5 * (hi[0] - lo[0]) * w, 0.5 * (hi[1] - lo[1]) * w)
    return np.stack([X.ravel(), Y.ravel()], axis=1), W.ravel()


def counterexample_report(rule_order=64, rule_grading=3.0, refine_order=96,
                          truncations=(1e-1, 1e-2, 1e-3), n_test_bumps=5,
                          bump_rule_order=96, seed=7):
    """Compute the counterexample quantities; returns a flat report dict."""
    domain = CuspDomain(2.0, 1, 0)
    rule = make_rule(domain, rule_order, rule_grading)
    rule_fine = make_rule(domain, refine_order, rule_grading)

    inv_sq = ScalarField(lambda pts: pts[..., 0] ** -2.0, name="x^-2")
    volume = integrate(rule, ScalarField(lambda pts: np.ones(pts.shape[:-1])))
    int_inv_sq = integrate(rule, inv_sq)
    c_star = int_inv_sq / volume
    pressure = project_mean_zero(rule, inv_sq)

    # (b) truncated L^2 norms: int_{x > eps} q^2 grows like 2/eps
    trunc = []
    for eps in truncations:
        val = integrate(rule_fine, ScalarField(
            lambda pts, e=eps: (pts[..., 0] > e)
            * (pts[..., 0] ** -2.0 - c_star) ** 2))
        trunc.append(val)

    # (c) weighted membership and (d) the L^2 conjugate-derivative witness
    weighted_sq = integrate(rule, ScalarField(
        lambda pts: (pts[..., 0] ** -2.0 - c_star) ** 2), weight_exponent=2.0)
    witness_sq = integrate(rule, ScalarField(
        lambda pts: (-2.0 * pts[..., 1] / pts[..., 0] ** 3.0) ** 2))

    # (e) weak identity int q dphi/dx = int (-2y/x^3) dphi/dy on test bumps,
    # each integrated on its own support-aligned rule
    rng = np.random.default_rng(seed)
    identity_errors = []
    for _ in range(n_test_bumps):
        cx = rng.uniform(0.4, 0.75)
        rx = rng.uniform(0.08, min(0.18, 0.95 - cx, cx - 0.15))
        ry = rng.uniform(0.35, 0.85) * (cx - rx) ** 2
        bump = bump_field([cx, 0.0], [rx, ry])
        pts, w = _support_box_rule(bump.support, bump_rule_order)
        grad = bump.gradient(pts)
        lhs = float((w * (pts[:, 0] ** -2.0 - c_star) * grad[:, 0]).sum())
        rhs = float((w * (-2.0 * pts[:, 1] / pts[:, 0] ** 3.0) * grad[:, 1]).sum())
        identity_errors.append(abs(lhs - rhs) / max(abs(lhs), abs(rhs)))

    # (f) L^r threshold and a sub-threshold integrability probe
    r0 = lr_exponent_threshold(domain.gamma, domain.k)
    r_probe = 0.9 * r0
    lr_coarse = integrate(rule, ScalarField(
        lambda pts: np.abs(pts[..., 0] ** -2.0 - c_star) ** r_probe))
    lr_fine = integrate(rule_fine, ScalarField(
        lambda pts: np.abs(pts[..., 0] ** -2.0 - c_star) ** r_probe))

    return {
        "gamma": domain.gamma,
        "k": domain.k,
        "m": domain.m,
        "volume": volume,
        "int_inv_sq": int_inv_sq,
        "c_star": c_star,
        "truncation_eps": list(truncations),
        "truncated_l2_sq": trunc,
        "weighted_l2_sq": weighted_sq,
        "conjugate_witness_l2_sq": witness_sq,
        "identity_errors": identity_errors,
        "r0": r0,
        "r_probe": r_probe,
        "lr_probe_coarse": lr_coarse,
        "lr_probe_fine": lr_fine,
        "rule_order": rule_order,
        "refine_order": refine_order,
        "rule_grading": rule_grading,
        "seed": seed,
    }
