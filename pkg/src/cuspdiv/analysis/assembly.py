"""Vectorized finite element assembly on graded meshes.

Velocity: continuous P1 enriched with cell bubbles (the smallest inf-sup
stable pair with P1 pressures on shape-regular meshes, so observed inf-sup
decay is attributable to the domain). Scalar dofs are ordered vertices
first, then one bubble per cell; vector dofs stack the two components
(component c of scalar dof s sits at c * n_scalar + s).

Cell quadrature is a collapsed 4x4 Gauss (Duffy) rule, exact for the
bubble-bubble mass; weighted forms evaluate the weight at the physical
quadrature points. Accumulation order is fixed by the COO scatter, so
assembly is deterministic.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


def triangle_rule(n=4):
    g, w = np.polynomial.legendre.leggauss(n)
    g = 0.5 * (g + 1.0)
    w = 0.5 * w
    G1, G2 = np.meshgrid(g, g, indexing="ij")
    W1, W2 = np.meshgrid(w, w, indexing="ij")
    xi = G1.ravel()
    eta = (G2 * (1.0 - G1)).ravel()
    wq = (W1 * W2 * (1.0 - G1)).ravel()
    return xi, eta, wq


@dataclass
class CellData:
    """Per-cell quadrature data shared by all the bilinear forms."""

    qpoints: np.ndarray     # (nc, nq, 2) physical quadrature points
    qweights: np.ndarray    # (nc, nq) includes |det J|
    values: np.ndarray      # (4, nq) scalar basis: 3 vertex hats + bubble
    grads: np.ndarray       # (nc, 4, nq, 2) physical gradients
    sdof: np.ndarray        # (nc, 4) scalar dof per local basis function
    n_scalar: int
    n_vertex: int


def cell_data(mesh):
    xi, eta, wq = triangle_rule(4)
    nq = len(xi)
    lam = np.stack([1.0 - xi - eta, xi, eta], axis=0)
    bub = 27.0 * lam[0] * lam[1] * lam[2]
    dlam = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
    dbub = 27.0 * (lam[1] * lam[2] * dlam[0][:, None]
                   + lam[0] * lam[2] * dlam[1][:, None]
                   + lam[0] * lam[1] * dlam[2][:, None])   # (2, nq)

    cells, coords = mesh.cells, mesh.coords
    v0 = coords[cells[:, 0]]
    v1 = coords[cells[:, 1]]
    v2 = coords[cells[:, 2]]
    J = np.stack([v1 - v0, v2 - v0], axis=2)               # columns are edges
    detJ = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    if not np.all(detJ > 0.0):
        raise ValueError("mesh contains inverted cells")
    Jinv = np.empty_like(J)
    Jinv[:, 0, 0] = J[:, 1, 1]
    Jinv[:, 0, 1] = -J[:, 0, 1]
    Jinv[:, 1, 0] = -J[:, 1, 0]
    Jinv[:, 1, 1] = J[:, 0, 0]
    Jinv /= detJ[:, None, None]

    qp = (v0[:, None, :] + np.einsum("q,cd->cqd", xi, v1 - v0)
          + np.einsum("q,cd->cqd", eta, v2 - v0))
    qw = wq[None, :] * detJ[:, None]

    vals = np.concatenate([lam, bub[None, :]], axis=0)
    gref = np.concatenate([np.repeat(dlam[:, None, :], nq, axis=1),
                           dbub.T[None, :, :]], axis=0)    # (4, nq, 2)
    gphys = np.einsum("anr,crd->cand", gref, Jinv)

    nv = mesh.vertex_count
    sdof = np.concatenate([cells, (nv + np.arange(mesh.cell_count))[:, None]],
                          axis=1)
    return CellData(qpoints=qp, qweights=qw, values=vals, grads=gphys,
                    sdof=sdof, n_scalar=nv + mesh.cell_count, n_vertex=nv)


def _scatter(loc, rows, cols, shape):
    ii = np.repeat(rows[:, :, None], cols.shape[1], axis=2).ravel()
    jj = np.repeat(cols[:, None, :], rows.shape[1], axis=1).ravel()
    return sp.coo_matrix((loc.ravel(), (ii, jj)), shape=shape).tocsr()


def scalar_mass(cd, weight):
    """Scalar mass matrix; weight is (nc, nq) and includes the cell weights."""
    loc = np.einsum("cq,aq,bq->cab", weight, cd.values, cd.values)
    return _scatter(loc, cd.sdof, cd.sdof, (cd.n_scalar, cd.n_scalar))


def scalar_stiffness(cd, weight):
    loc = np.einsum("cq,caqd,cbqd->cab", weight, cd.grads, cd.grads)
    return _scatter(loc, cd.sdof, cd.sdof, (cd.n_scalar, cd.n_scalar))


def pressure_mass(cd, mesh, weight):
    """P1 pressure mass on vertices with the given quadrature weight."""
    loc = np.einsum("cq,aq,bq->cab", weight, cd.values[:3], cd.values[:3])
    return _scatter(loc, mesh.cells, mesh.cells, (cd.n_vertex, cd.n_vertex))


def divergence_coupling(cd, mesh, weight):
    """B[a, (c, b)] = integral p_a d(phi_b)/d x_c, returned per component."""
    out = []
    for c in range(2):
        loc = np.einsum("cq,aq,cbq->cab", weight, cd.values[:3],
                        cd.grads[:, :, :, c])
        out.append(_scatter(loc, mesh.cells, cd.sdof,
                            (cd.n_vertex, cd.n_scalar)))
    return out


def symmetric_gradient_gram(cd, weight):
    """Vector-valued eps(u):eps(v) Gram with a scalar weight.

    For components (c, d):
    eps(phi e_c) : eps(psi e_d) = [delta_cd grad phi . grad psi
                                   + d_d phi d_c psi] / 2.
    """
    n_s = cd.n_scalar
    locg = np.einsum("cq,caqd,cbqd->cab", weight, cd.grads, cd.grads)
    blocks = [[None, None], [None, None]]
    for c in range(2):
        for d in range(2):
            locx = np.einsum("cq,caq,cbq->cab", weight,
                             cd.grads[:, :, :, d], cd.grads[:, :, :, c])
            loc = 0.5 * locx + (0.5 * locg if c == d else 0.0)
            blocks[c][d] = sp.coo_matrix(
                (loc.ravel(),
                 (np.repeat(cd.sdof[:, :, None], 4, axis=2).ravel(),
                  np.repeat(cd.sdof[:, None, :], 4, axis=1).ravel())),
                shape=(n_s, n_s))
    return sp.bmat(blocks).tocsr()


def vector_block(mat):
    """Block-diagonal lift of a scalar operator to 2-component fields."""
    return sp.block_diag([mat, mat]).tocsr()
