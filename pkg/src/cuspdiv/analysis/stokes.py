"""Discrete Stokes inf-sup constants in weighted pressure norms.

The constant is sqrt of the smallest eigenvalue of the pressure Schur
complement (B A^-1 B^T) q = lambda M_w q on the weighted-mean-zero pressure
space, where A is the full H^1 inner product of the velocity space with zero
boundary values and M_w the pressure mass with weight d_M^exponent. The
plain H^1 velocity norm is the right one here: a pressure q is matched by a
divergence solution with that norm control, which is what the generalized
saddle-point analysis consumes.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import (cell_data, divergence_coupling, pressure_mass,
                       scalar_mass, scalar_stiffness, vector_block)


@dataclass
class DiscreteSaddle:
    A: sp.csr_matrix         # velocity H^1 operator, boundary dofs removed
    Bop: sp.csr_matrix       # (pressure, velocity) div coupling
    M_w: sp.csr_matrix       # weighted pressure mass
    M: sp.csr_matrix         # plain pressure mass
    keep_scalar: np.ndarray  # scalar velocity dofs kept after the BC
    pressure_weight_exponent: float
    mesh: object


def assemble_stokes(mesh, pressure_weight_exponent=0.0):
    cd = cell_data(mesh)
    d = np.sqrt((cd.qpoints ** 2).sum(axis=2))
    qw = cd.qweights
    w_press = qw * d ** pressure_weight_exponent \
        if pressure_weight_exponent != 0.0 else qw

    mass = scalar_mass(cd, qw)
    stiff = scalar_stiffness(cd, qw)
    Bx, By = divergence_coupling(cd, mesh, qw)
    M = pressure_mass(cd, mesh, qw)
    M_w = pressure_mass(cd, mesh, w_press) \
        if pressure_weight_exponent != 0.0 else M

    # zero boundary values on vertex dofs; bubbles vanish on cell boundaries
    keep = np.concatenate([~mesh.boundary_vertex,
                           np.ones(mesh.cell_count, dtype=bool)])
    ks = np.flatnonzero(keep)
    A1 = (mass + stiff)[ks][:, ks]
    A = vector_block(A1).tocsc()
    Bop = sp.hstack([Bx[:, ks], By[:, ks]]).tocsr()
    return DiscreteSaddle(A=A, Bop=Bop, M_w=M_w.tocsr(), M=M.tocsr(),
                          keep_scalar=ks,
                          pressure_weight_exponent=pressure_weight_exponent,
                          mesh=mesh)


def _constraint_basis(c):
    """Orthonormal basis of {q : c . q = 0} via one Householder reflection."""
    v = c.astype(float).copy()
    v[0] += np.copysign(np.linalg.norm(c), c[0] if c[0] != 0.0 else 1.0)
    H = np.eye(len(c)) - 2.0 * np.outer(v, v) / (v @ v)
    return H[:, 1:]


def inf_sup_constant(saddle, chunk=512):
    """sqrt(lambda_min) of (B A^-1 B^T) q = lambda M_w q on mean-zero q.

    The Schur complement is formed densely (pressure spaces stay small) with
    chunked sparse solves; the weighted-mean constraint int q omega = 0 is
    eliminated with a Householder basis and the projected pencil solved with
    a dense symmetric eigensolver, all deterministic.
    """
    lu = spla.splu(saddle.A)
    Bd = saddle.Bop.toarray()
    n_p = Bd.shape[0]
    AinvBt = np.empty((saddle.A.shape[0], n_p))
    for lo in range(0, n_p, chunk):
        hi = min(lo + chunk, n_p)
        AinvBt[:, lo:hi] = lu.solve(Bd[lo:hi].T)
    S = Bd @ AinvBt
    S = 0.5 * (S + S.T)

    weights = np.asarray(saddle.M_w.sum(axis=1)).ravel()   # int p_a * omega
    Z = _constraint_basis(weights)
    Sc = Z.T @ S @ Z
    Mc = Z.T @ (saddle.M_w @ Z)
    lam = sla.eigh(Sc, 0.5 * (Mc + Mc.T), subset_by_index=[0, 0],
                   eigvals_only=True)[0]
    return float(np.sqrt(max(lam, 0.0)))
