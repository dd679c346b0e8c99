"""Discrete weighted Korn constants and the lifted-measure transfer check.

The best constant in

    ||Du||_{L^2(Omega, d^{2 beta})} <= C { ||u||_{L^2(B)}
        + ||eps(u)||_{L^2(Omega, d^{2(beta+1-gamma)})} }

over the discrete velocity space WITHOUT boundary conditions is
1/sqrt(lambda_min) of the eigenproblem minimizing the bracket subject to
||Du|| = 1; rigid motions are controlled by the ball term, which keeps the
denominator operator positive definite. The pencil is diagonally rescaled
before the Lanczos solve: the singular weights near the tip make the raw
operators too ill-conditioned to factor reliably.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..geometry import lifted_integral_identity, LiftedDomain
from ..quadrature import ParameterError, make_rule
from ..fields import ScalarField
from .assembly import (cell_data, scalar_mass, scalar_stiffness,
                       symmetric_gradient_gram, vector_block)

DEFAULT_BALL = ((0.75, 0.0), 0.125)


def _ball_inside(mesh, center, radius):
    th = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    pts = np.stack([center[0] + radius * np.cos(th),
                    center[1] + radius * np.sin(th)], axis=1)
    x, y = pts[:, 0], pts[:, 1]
    return bool(np.all((x > mesh.eps_mesh) & (x < 1.0)
                       & (np.abs(y) < x ** mesh.domain.gamma)))


def korn_constant(mesh, beta, ball=DEFAULT_BALL, right_weight_exponent=None,
                  maxiter=20000):
    """Best discrete constant of the weighted Korn inequality (p = 2).

    right_weight_exponent defaults to 2 (beta + 1 - gamma); passing 0.0 gives
    the fully unweighted variant whose constant blows up on cusps.
    """
    if beta < 0.0:
        raise ParameterError(f"beta must be >= 0, got {beta}")
    center, radius = ball
    if not _ball_inside(mesh, center, radius):
        raise ParameterError(f"ball {ball} is not inside the meshed domain")
    gamma = mesh.domain.gamma
    if right_weight_exponent is None:
        right_weight_exponent = 2.0 * (beta + 1.0 - gamma)

    cd = cell_data(mesh)
    qw = cd.qweights
    d = np.sqrt((cd.qpoints ** 2).sum(axis=2))
    w_left = qw * d ** (2.0 * beta) if beta != 0.0 else qw
    w_right = qw * d ** right_weight_exponent \
        if right_weight_exponent != 0.0 else qw
    in_ball = ((cd.qpoints - np.asarray(center)) ** 2).sum(axis=2) < radius ** 2
    w_ball = qw * in_ball

    G = vector_block(scalar_stiffness(cd, w_left))
    Mb = vector_block(scalar_mass(cd, w_ball))
    E = symmetric_gradient_gram(cd, w_right)
    K = (Mb + E).tocsr()

    scale = 1.0 / np.sqrt(K.diagonal())
    D = sp.diags(scale)
    Gt = (D @ G @ D).tocsc()
    Kt = (D @ K @ D).tocsc()
    v0 = np.ones(G.shape[0])
    v0 /= np.linalg.norm(v0)
    mu = spla.eigsh(Gt, k=1, M=Kt, which="LA", v0=v0, maxiter=maxiter,
                    return_eigenvectors=False)[0]
    return float(np.sqrt(mu))


def lifted_korn_transfer_check(domain, n_prime, s, g, p=2.0, rule_order=32,
                               rule_grading=3.0):
    """Both sides of the measure identity that moves the Korn inequality from
    the dimension-lifted domain back to the base domain: integrating |g|^p
    over Omega^{n', s} equals vol(B_1^{n'}) * integral |g|^p x^(s n')."""
    lifted = LiftedDomain(base=domain, n_prime=n_prime, s=s)
    rule = make_rule(domain, rule_order, rule_grading)
    gp = ScalarField(lambda pts: np.abs(np.asarray(g(pts), dtype=float)) ** p,
                     name=f"|{getattr(g, 'name', 'g')}|^{p:g}")
    return lifted_integral_identity(lifted, gp, rule)
