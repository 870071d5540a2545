"""Truncated Jacobi projection u_I.

On each cell the 1D projection Q keeps the expansion of u in
J_0^{-2,-2}..J_k^{-2,-2}.  Its residual has zero value and slope at both
cell ends and is orthogonal to P_{k-4}, so Q is fixed by the functionals

    u(-1), u(1), u'(-1), u'(1), int u L_j ds  (j = 0..k-4)

in the reference coordinate.  The 2D projection is the tensor product of the
x and y projections.  Functionals on shared nodes and edges agree between
neighbours, so u_I is C1.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .mesh import TensorMesh
from .polykernel import gauss_rule, legendre_table, shape_table
from .problems import Exact, broadcast
from .spaces import CoefficientField, TrialSpace


class Projector1D:
    """Map from reference functionals to J^{-2,-2} coefficients.

    Functional order: [u(-1), u(1), u'(-1), u'(1), m_0, .., m_{k-4}] with
    reference-coordinate slopes and moments ``m_j = int_{-1}^{1} u L_j ds``;
    this matches the basis order J_0..J_k.
    """

    def __init__(self, k: int):
        if k < 3:
            raise ValueError(f"k must be >= 3, got {k}")
        self.k = k
        n_mom = k - 3
        quad = gauss_rule(k + 2)
        s, w = np.asarray(quad.nodes), np.asarray(quad.weights)
        if n_mom:
            # gram[j, p] = int J_p L_j ds, exact with k+2 points
            gram = np.einsum("ja,pa,a->jp", legendre_table(n_mom - 1, s),
                             shape_table(k, s), w)
        else:
            gram = np.zeros((0, k + 1))
        self.gram = gram
        mat = np.zeros((k + 1, k + 1))
        mat[:4, :4] = np.eye(4)
        if n_mom:
            inv = np.linalg.inv(gram[:, 4:])
            mat[4:, :4] = -inv @ gram[:, :4]
            mat[4:, 4:] = inv
        self.matrix = mat

    def apply(self, functionals) -> np.ndarray:
        return self.matrix @ np.asarray(functionals, dtype=float)


@lru_cache(maxsize=None)
def projector(k: int) -> Projector1D:
    return Projector1D(k)


def project_1d(interval: tuple[float, float], values, slopes, moments=()) -> np.ndarray:
    """Coefficients of Q u in J_0^{-2,-2}..J_k^{-2,-2} on ``interval``.

    ``values`` and ``slopes`` are u and du/dx at the two ends (physical
    derivative); ``moments`` are the k-3 reference moments int u L_j ds.
    The degree is k = 3 + len(moments).
    """
    h = interval[1] - interval[0]
    k = 3 + len(moments)
    f = np.concatenate((np.asarray(values, dtype=float),
                        0.5 * h * np.asarray(slopes, dtype=float),
                        np.asarray(moments, dtype=float)))
    return projector(k).apply(f)


def _functional_rows(k: int, n_quad: int):
    """Functional weights on the sample set [-1, 1, gauss nodes]."""
    quad = gauss_rule(n_quad)
    pts = np.concatenate(([-1.0, 1.0], quad.nodes))
    fv = np.zeros((k + 1, pts.size))
    fd = np.zeros((k + 1, pts.size))
    fv[0, 0] = fv[1, 1] = 1.0
    fd[2, 0] = fd[3, 1] = 1.0
    if k > 3:
        fv[4:, 2:] = legendre_table(k - 4, quad.nodes) * quad.weights[None, :]
    return pts, fv, fd


def functional_data(exact: Exact, mesh: TensorMesh, k: int, n_quad: int | None = None) -> np.ndarray:
    """Tensor functionals (lambda_p^x x lambda_q^y)(u) per element.

    Shape (M, N, k+1, k+1).  Moments use a Gauss rule with ``k + 4`` points
    per direction unless ``n_quad`` is given.
    """
    n_quad = k + 4 if n_quad is None else n_quad
    pts, fv, fd = _functional_rows(k, n_quad)
    hx, hy = mesh.px.gaps, mesh.py.gaps
    X = (mesh.px.coords[:-1, None] + 0.5 * hx[:, None] * (pts + 1))[:, None, :, None]
    Y = (mesh.py.coords[:-1, None] + 0.5 * hy[:, None] * (pts + 1))[None, :, None, :]
    sx = (0.5 * hx)[:, None, None, None]
    sy = (0.5 * hy)[None, :, None, None]
    u = broadcast(exact.u, X, Y)
    ux = broadcast(exact.ux, X, Y) * sx
    uy = broadcast(exact.uy, X, Y) * sy
    uxy = broadcast(exact.uxy, X, Y) * sx * sy
    return (np.einsum("pa,ijab,qb->ijpq", fv, u, fv)
            + np.einsum("pa,ijab,qb->ijpq", fd, ux, fv)
            + np.einsum("pa,ijab,qb->ijpq", fv, uy, fd)
            + np.einsum("pa,ijab,qb->ijpq", fd, uxy, fd))


def project_2d(exact: Exact, mesh: TensorMesh, k: int,
               space: TrialSpace | None = None, n_quad: int | None = None) -> CoefficientField:
    """Truncated Jacobi projection of ``exact`` as a trial-space field.

    By default the field lives in the unconstrained C1 space (boundary
    values kept); pass a homogeneous ``space`` when u vanishes on the
    boundary and the field should share u_h's DOF layout.
    """
    if space is None:
        space = TrialSpace(mesh, k, homogeneous=False)
    P = projector(k).matrix
    local = np.einsum("pa,ijab,qb->ijpq", P, functional_data(exact, mesh, k, n_quad), P)
    return CoefficientField.from_local(space, local)
