"""Petrov-Galerkin system assembly.

Row ``theta`` and column ``phi`` of the matrix hold

    a(phi, theta) = sum_tau int_tau (-alpha lap(phi) - grad(alpha).grad(phi)
                                     + beta.grad(phi) + gamma phi) theta

with no integration by parts: trial functions are piecewise Q_k, so their
second derivatives exist on every element.  Rows are test functions,
element-major; columns follow the trial DOF map.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse

from .mesh import Element, TensorMesh
from .polykernel import QuadRule, gauss_rule, legendre_table, shape_table
from .problems import ProblemSpec, broadcast, forcing
from .spaces import TestSpace, TrialSpace


@dataclass
class SparseSystem:
    matrix: sparse.csr_matrix
    rhs: np.ndarray
    trial: TrialSpace
    test: TestSpace

    @property
    def order(self) -> int:
        return self.matrix.shape[0]


def default_quad_points(k: int, constant: bool) -> int:
    return k + 1 if constant else k + 3


def _resolve_quad(quad, k: int, problem: ProblemSpec) -> QuadRule:
    if quad is None:
        quad = default_quad_points(k, problem.constant_coefficients)
    if not isinstance(quad, QuadRule):
        quad = gauss_rule(int(quad))
    # trial (deg k) times test (deg k-2) per direction needs 2m-1 >= 2k
    if len(quad.nodes) < k + 1:
        raise ValueError(f"quadrature with {len(quad.nodes)} points per direction is "
                         f"below the minimum {k + 1} for k={k}")
    return quad


def _physical_points(x0, hx, y0, hy, s):
    X = x0[:, None] + 0.5 * hx[:, None] * (s[None, :] + 1)
    Y = y0[:, None] + 0.5 * hy[:, None] * (s[None, :] + 1)
    return X[:, None, :, None], Y[None, :, None, :]


def _blocks(x0, hx, y0, hy, problem: ProblemSpec, k: int, quad: QuadRule):
    """Element blocks for every (x-cell, y-cell) pair.

    Returns shape (Mx, Ny, (k-1)**2, (k+1)**2), trial shapes unscaled
    (plain J_p^{-2,-2}(s) J_q^{-2,-2}(t)).
    """
    s, w = np.asarray(quad.nodes), np.asarray(quad.weights)
    X, Y = _physical_points(x0, hx, y0, hy, s)
    shape = np.broadcast(X, Y).shape
    X, Y = np.broadcast_to(X, shape), np.broadcast_to(Y, shape)

    jac = 0.25 * hx[:, None] * hy[None, :]
    W = w[None, None, :, None] * w[None, None, None, :] * jac[:, :, None, None]
    fx = (2 / hx)[:, None, None, None]
    fy = (2 / hy)[None, :, None, None]

    alpha = broadcast(problem.alpha, X, Y)
    ax, ay = (np.broadcast_to(np.asarray(g, dtype=float), shape)
              for g in problem.grad_alpha(X, Y))
    bx, by = (np.broadcast_to(np.asarray(g, dtype=float), shape)
              for g in problem.beta(X, Y))
    gamma = broadcast(problem.gamma, X, Y)

    weights = {
        (2, 0): -alpha * W * fx ** 2,
        (0, 2): -alpha * W * fy ** 2,
        (1, 0): (bx - ax) * W * fx,
        (0, 1): (by - ay) * W * fy,
        (0, 0): gamma * W,
    }
    T = legendre_table(k - 2, s)
    P = [np.einsum("ra,pa->rpa", T, shape_table(k, s, d)) for d in range(3)]
    M, N = W.shape[:2]
    out = np.zeros((M, N, k - 1, k - 1, k + 1, k + 1))
    for (dx, dy), wgt in weights.items():
        out += np.einsum("rpa,ijab,sqb->ijrspq", P[dx], wgt, P[dy], optimize=True)
    return out.reshape(M, N, (k - 1) ** 2, (k + 1) ** 2)


def element_matrix(element: Element, problem: ProblemSpec, k: int, quad=None) -> np.ndarray:
    """Local block of shape ((k-1)**2, (k+1)**2) for plain reference shapes.

    Entry (p*(k-1)+q, r*(k+1)+s) pairs test L_p(s) L_q(t) with trial
    J_r^{-2,-2}(s) J_s^{-2,-2}(t) mapped to ``element``.
    """
    quad = _resolve_quad(quad, k, problem)
    b = _blocks(np.array([element.x[0]]), np.array([element.hx]),
                np.array([element.y[0]]), np.array([element.hy]), problem, k, quad)
    return b[0, 0]


def element_matrices(mesh: TensorMesh, problem: ProblemSpec, k: int, quad=None) -> np.ndarray:
    quad = _resolve_quad(quad, k, problem)
    return _blocks(mesh.px.coords[:-1], mesh.px.gaps, mesh.py.coords[:-1], mesh.py.gaps,
                   problem, k, quad)


def load_vector(mesh: TensorMesh, problem: ProblemSpec, k: int, quad=None) -> np.ndarray:
    quad = _resolve_quad(quad, k, problem)
    s, w = np.asarray(quad.nodes), np.asarray(quad.weights)
    X, Y = _physical_points(mesh.px.coords[:-1], mesh.px.gaps,
                            mesh.py.coords[:-1], mesh.py.gaps, s)
    jac = 0.25 * mesh.px.gaps[:, None] * mesh.py.gaps[None, :]
    fw = broadcast(forcing(problem), X, Y) * (w[:, None] * w[None, :]) * jac[:, :, None, None]
    T = legendre_table(k - 2, s)
    return np.einsum("ra,ijab,sb->ijrs", T, fw, T).ravel()


def assemble(mesh: TensorMesh, problem: ProblemSpec, k: int, quad=None) -> SparseSystem:
    """Assemble the global system (CSR matrix and load vector).

    ``quad`` is a point count per direction or a :class:`QuadRule`; by
    default k+1 for constant and k+3 for variable coefficients.
    """
    trial = TrialSpace(mesh, k)
    test = TestSpace(mesh, k)
    quad = _resolve_quad(quad, k, problem)
    blocks = element_matrices(mesh, problem, k, quad)
    idx, scale = trial.all_element_dofs()
    blocks = blocks * scale[:, :, None, :]

    M, N = mesh.M, mesh.N
    rows = np.arange(test.dim).reshape(M, N, -1, 1)
    rows = np.broadcast_to(rows, blocks.shape)
    cols = np.broadcast_to(idx[:, :, None, :], blocks.shape)
    keep = cols >= 0
    matrix = sparse.csr_matrix((blocks[keep], (rows[keep], cols[keep])),
                               shape=(test.dim, trial.dim))
    matrix.sort_indices()
    rhs = load_vector(mesh, problem, k, quad)
    return SparseSystem(matrix, rhs, trial, test)


def residual_check(system: SparseSystem, c) -> float:
    """max_i |A c - b|_i / (1 + ||b||_inf)."""
    c = np.asarray(c, dtype=float)
    if c.shape != (system.matrix.shape[1],):
        raise ValueError(f"solution length {c.shape} does not match order {system.order}")
    r = system.matrix @ c - system.rhs
    return float(np.max(np.abs(r)) / (1 + np.max(np.abs(system.rhs), initial=0.0)))
