"""Trial space (C1 Q_k, zero trace) and test space (discontinuous Q_{k-2}).

The trial space is the tensor product of two 1D C1 spaces.  Each 1D space
is spanned by the Hermite cubics tied to mesh nodes (a value shape and a
slope shape per node) plus the element bubbles J_p^{-2,-2}, p = 4..k.
Slope shapes are scaled by h/2 so that their coefficient is the physical
derivative at the node.  With ``homogeneous=True`` the value shapes at the
two ends of each axis are dropped, which leaves exactly the functions that
vanish on the boundary.
"""
from __future__ import annotations

import numpy as np

from .mesh import TensorMesh
from .polykernel import MAX_DEGREE, gjacobi, legendre, shape_table


def _check_degree(k: int):
    if not 3 <= k <= MAX_DEGREE:
        raise ValueError(f"trial degree must lie in [3, {MAX_DEGREE}], got {k}")


def trial_dim(M: int, N: int, k: int) -> int:
    return M * N * (k - 1) ** 2


def test_dim(M: int, N: int, k: int) -> int:
    return M * N * (k - 1) ** 2


test_dim.__test__ = False  # keep pytest from collecting the re-export


def dof_map_1d(coords: np.ndarray, k: int, homogeneous: bool = True):
    """Local-to-global map and shape scaling for one axis.

    Returns ``(gmap, scale, n)``: ``gmap[i, p]`` is the 1D global index of
    local shape ``p`` on cell ``i`` (-1 when eliminated by the boundary
    condition), ``scale[i, p]`` the factor multiplying J_p^{-2,-2}, and ``n``
    the number of 1D degrees of freedom.

    Local shapes: 0 left value, 1 right value, 2 left slope, 3 right slope,
    4..k bubbles.  Global ordering follows the axis: node 0 (value, slope),
    bubbles of cell 0, node 1, ...
    """
    M = len(coords) - 1
    nb = k - 3
    stride = 2 + nb
    i = np.arange(M)[:, None]
    gmap = np.empty((M, k + 1), dtype=np.int64)
    gmap[:, 0:1] = i * stride
    gmap[:, 1:2] = (i + 1) * stride
    gmap[:, 2:3] = i * stride + 1
    gmap[:, 3:4] = (i + 1) * stride + 1
    gmap[:, 4:] = i * stride + 2 + np.arange(nb)[None, :]
    n_full = M * stride + 2

    keep = np.ones(n_full, dtype=bool)
    if homogeneous:
        keep[0] = False
        keep[M * stride] = False
    renumber = np.full(n_full, -1, dtype=np.int64)
    renumber[keep] = np.arange(keep.sum())
    gmap = renumber[gmap]

    h = np.diff(coords)
    scale = np.ones((M, k + 1))
    scale[:, 2] = scale[:, 3] = h / 2
    return gmap, scale, int(keep.sum())


class TrialSpace:
    """C1 piecewise Q_k functions on ``mesh``.

    Global DOF ``ix * ny + iy`` couples 1D x-DOF ``ix`` with 1D y-DOF ``iy``.
    """

    def __init__(self, mesh: TensorMesh, k: int, homogeneous: bool = True):
        _check_degree(k)
        self.mesh = mesh
        self.k = k
        self.homogeneous = homogeneous
        self.gx, self.sx, self.nx = dof_map_1d(mesh.px.coords, k, homogeneous)
        self.gy, self.sy, self.ny = dof_map_1d(mesh.py.coords, k, homogeneous)

    @property
    def dim(self) -> int:
        return self.nx * self.ny

    @property
    def n_local(self) -> int:
        return (self.k + 1) ** 2

    def element_dofs(self, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Global indices (-1 if eliminated) and scales of the (k+1)^2 local
        shapes on element (i, j), local index ``p * (k+1) + q``."""
        gx, gy = self.gx[i], self.gy[j]
        idx = np.where((gx[:, None] >= 0) & (gy[None, :] >= 0),
                       gx[:, None] * self.ny + gy[None, :], -1)
        return idx.ravel(), np.outer(self.sx[i], self.sy[j]).ravel()

    def all_element_dofs(self) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized :meth:`element_dofs`: arrays of shape (M, N, (k+1)^2)."""
        gx = self.gx[:, None, :, None]
        gy = self.gy[None, :, None, :]
        idx = np.where((gx >= 0) & (gy >= 0), gx * self.ny + gy, -1)
        scale = self.sx[:, None, :, None] * self.sy[None, :, None, :]
        M, N = self.mesh.M, self.mesh.N
        return idx.reshape(M, N, -1), scale.reshape(M, N, -1)


class TestSpace:
    """Discontinuous Q_{k-2}: tensor Legendre L_p(s) L_q(t) on each element.

    Row index of basis (i, j, p, q) is ``(i*N + j) * (k-1)**2 + p*(k-1) + q``.
    """

    __test__ = False

    def __init__(self, mesh: TensorMesh, k: int):
        _check_degree(k)
        self.mesh = mesh
        self.k = k

    @property
    def n_local(self) -> int:
        return (self.k - 1) ** 2

    @property
    def dim(self) -> int:
        return self.mesh.M * self.mesh.N * self.n_local

    def index(self, i: int, j: int, p: int, q: int) -> int:
        return (i * self.mesh.N + j) * self.n_local + p * (self.k - 1) + q

    def eval_basis(self, p: int, q: int, s, t):
        return legendre(p, s).value * legendre(q, t).value


def eval_trial_basis(space: TrialSpace, i: int, j: int, local: int, s, t,
                     dx: int = 0, dy: int = 0):
    """Local trial shape ``local = p*(k+1) + q`` on element (i, j).

    Derivatives are physical (chain rule applied); slope shapes include their
    h/2 scaling.
    """
    k = space.k
    if not 0 <= local < (k + 1) ** 2:
        raise IndexError(f"local index {local} out of range")
    if dx > 2 or dy > 2:
        raise ValueError("derivative order above 2 is not supported")
    p, q = divmod(local, k + 1)
    hx = space.mesh.px.gaps[i]
    hy = space.mesh.py.gaps[j]
    fx = gjacobi(p, s)[dx] * space.sx[i, p] * (2 / hx) ** dx
    fy = gjacobi(q, t)[dy] * space.sy[j, q] * (2 / hy) ** dy
    return fx * fy


class CoefficientField:
    """A trial-space function given by its global DOF vector."""

    def __init__(self, space: TrialSpace, values=None):
        self.space = space
        if values is None:
            values = np.zeros(space.dim)
        values = np.asarray(values, dtype=float)
        if values.shape != (space.dim,):
            raise ValueError(f"expected {space.dim} values, got shape {values.shape}")
        self.values = values

    @classmethod
    def from_local(cls, space: TrialSpace, local: np.ndarray) -> "CoefficientField":
        """Build a field from per-element coefficients of J_p(s) J_q(t).

        ``local`` has shape (M, N, k+1, k+1).  Shared DOFs are read from the
        last element touching them, so ``local`` must already be conforming.
        """
        idx, scale = space.all_element_dofs()
        local = local.reshape(idx.shape)
        values = np.zeros(space.dim)
        mask = idx >= 0
        values[idx[mask]] = local[mask] / scale[mask]
        return cls(space, values)

    def local_coefficients(self) -> np.ndarray:
        """Coefficients of J_p(s) J_q(t) per element, shape (M, N, k+1, k+1)."""
        sp = self.space
        u = np.zeros((sp.nx + 1, sp.ny + 1))
        u[:-1, :-1] = self.values.reshape(sp.nx, sp.ny)
        c = u[sp.gx[:, None, :, None], sp.gy[None, :, None, :]]
        return c * sp.sx[:, None, :, None] * sp.sy[None, :, None, :]

    def on_elements(self, s, t, dx: int = 0, dy: int = 0) -> np.ndarray:
        """Evaluate at reference points ``s x t`` inside every element.

        Returns shape (M, N, len(s), len(t)); derivatives are physical.
        """
        sp = self.space
        bx = shape_table(sp.k, s, dx)
        by = shape_table(sp.k, t, dy)
        out = np.einsum("ijpq,pa,qb->ijab", self.local_coefficients(), bx, by)
        fx = (2 / sp.mesh.px.gaps) ** dx
        fy = (2 / sp.mesh.py.gaps) ** dy
        return out * fx[:, None, None, None] * fy[None, :, None, None]

    def evaluate(self, x, y, dx: int = 0, dy: int = 0) -> np.ndarray:
        """Evaluate at physical points (arrays broadcast together)."""
        if dx > 2 or dy > 2:
            raise ValueError("derivative order above 2 is not supported")
        mesh = self.space.mesh
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        shape = x.shape
        x, y = x.ravel(), y.ravel()
        if not np.all(mesh.contains(x, y)):
            raise ValueError("evaluation point outside the domain")
        i = mesh.px.locate(x)
        j = mesh.py.locate(y)
        x0, hx = mesh.px.coords[i], mesh.px.gaps[i]
        y0, hy = mesh.py.coords[j], mesh.py.gaps[j]
        s = 2 * (x - x0) / hx - 1
        t = 2 * (y - y0) / hy - 1
        k = self.space.k
        bx = shape_table(k, s, dx)
        by = shape_table(k, t, dy)
        c = self.local_coefficients()[i, j]
        out = np.einsum("npq,pn,qn->n", c, bx, by)
        out *= (2 / hx) ** dx * (2 / hy) ** dy
        return out.reshape(shape)

    __call__ = evaluate
