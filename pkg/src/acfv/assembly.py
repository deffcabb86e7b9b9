"""Assembly of the mass and stiffness operators from a mesh.

The mass operator is diagonal with the cell areas on the diagonal and
is kept as a plain 1-d array.  The stiffness operator couples each
interior edge with the transmissibility m_sigma / d_{K|L} (two-point
flux), giving a symmetric positive semi-definite sparse matrix with
zero row sums.  Both triangles are stored so matrix-vector products
stay branch-free; cell counts are small enough that the duplicated
memory is irrelevant.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sps

from .mesh import Mesh

__all__ = ["assemble_mass", "assemble_stiffness"]


def assemble_mass(mesh: Mesh) -> np.ndarray:
    """Diagonal of the mass operator: the cell measures m_K."""
    return np.array(mesh.cell_measures, dtype=float)


def assemble_stiffness(mesh: Mesh) -> sps.csr_matrix:
    """Two-point flux stiffness matrix.

    Entry (K, K) accumulates m_sigma / d_sigma over the interior edges
    of K; entry (K, L) is -m_sigma / d_sigma for neighbors K, L; all
    other entries vanish.  Exterior edges contribute nothing (Neumann).
    """
    n = mesh.n_cells
    if mesh.n_edges == 0:
        return sps.csr_matrix((n, n))
    K = mesh.edge_cells[:, 0]
    L = mesh.edge_cells[:, 1]
    w = mesh.edge_measures / mesh.edge_distances

    rows = np.concatenate([K, L, K, L])
    cols = np.concatenate([K, L, L, K])
    vals = np.concatenate([w, w, -w, -w])
    return sps.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
