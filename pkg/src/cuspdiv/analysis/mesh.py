"""Graded simplicial meshes of truncated 2D cusp profiles (k = 1, m = 0).

The exact domain has a degenerate tip no mesh can cover, so the mesh lives
on {eps_mesh < x < 1, |y| < x^gamma} with layer boundaries in geometric
progression toward x = eps_mesh and a fixed number of cross-section cells
per layer; refinement doubles both counts, so cells grow ~4x per level.
Constants are studied as eps_mesh -> 0, which is where weighted and
unweighted behavior separates.
"""

from dataclasses import dataclass

import numpy as np

from ..geometry import CuspDomain
from ..quadrature import ParameterError


@dataclass
class GradedMesh:
    domain: CuspDomain
    level: int
    eps_mesh: float
    coords: np.ndarray           # (nv, 2)
    cells: np.ndarray            # (nc, 3), positively oriented
    boundary_vertex: np.ndarray  # (nv,) bool
    n_layers: int
    n_cross: int

    @property
    def cell_count(self):
        return len(self.cells)

    @property
    def vertex_count(self):
        return len(self.coords)

    def area(self):
        v0 = self.coords[self.cells[:, 0]]
        v1 = self.coords[self.cells[:, 1]]
        v2 = self.coords[self.cells[:, 2]]
        det = ((v1[:, 0] - v0[:, 0]) * (v2[:, 1] - v0[:, 1])
               - (v1[:, 1] - v0[:, 1]) * (v2[:, 0] - v0[:, 0]))
        return float(0.5 * det.sum())


def build_graded_mesh(domain, level, eps_mesh, base_layers=24, base_cross=6):
    """Triangulate {eps_mesh < x < 1, |y| < x^gamma} at a refinement level.

    Layer widths are geometric toward eps_mesh (ratio (1/eps)^(1/layers)),
    cells within a layer share the same shape.
    """
    if domain.k != 1 or domain.m != 0:
        raise ParameterError("meshes are built for k=1, m=0 profiles only")
    if level < 0:
        raise ParameterError(f"level must be >= 0, got {level}")
    if eps_mesh <= 0.0:
        raise ParameterError(f"eps_mesh must be positive, got {eps_mesh}")

    n_layers = base_layers * 2 ** level
    n_cross = base_cross * 2 ** level
    sigma = (1.0 / eps_mesh) ** (1.0 / n_layers)
    xs = eps_mesh * sigma ** np.arange(n_layers + 1)
    xs[-1] = 1.0
    eta = np.linspace(-1.0, 1.0, n_cross + 1)

    XX, EE = np.meshgrid(xs, eta, indexing="ij")
    YY = EE * XX ** domain.gamma
    coords = np.stack([XX.ravel(), YY.ravel()], axis=1)

    nvx, nvy = n_layers + 1, n_cross + 1
    vid = np.arange(nvx * nvy).reshape(nvx, nvy)
    cells = []
    for i in range(n_layers):
        for j in range(n_cross):
            v00, v01 = vid[i, j], vid[i, j + 1]
            v10, v11 = vid[i + 1, j], vid[i + 1, j + 1]
            cells.append([v00, v10, v11])
            cells.append([v00, v11, v01])
    cells = np.asarray(cells, dtype=np.int64)

    boundary = np.zeros(nvx * nvy, dtype=bool)
    boundary[vid[0, :]] = True
    boundary[vid[-1, :]] = True
    boundary[vid[:, 0]] = True
    boundary[vid[:, -1]] = True

    return GradedMesh(domain=domain, level=level, eps_mesh=eps_mesh,
                      coords=coords, cells=cells, boundary_vertex=boundary,
                      n_layers=n_layers, n_cross=n_cross)
