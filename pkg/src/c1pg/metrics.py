"""Error functionals: Sobolev norms, nodal errors and errors sampled on the
superconvergence point and line sets."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .mesh import TensorMesh
from .polykernel import gauss_rule, node_sets
from .problems import Exact, broadcast
from .spaces import CoefficientField

RATE_FLOOR = 1e-12

Reference = Union[Exact, CoefficientField]


def sample(obj: Reference, mesh: TensorMesh, s, t, dx: int = 0, dy: int = 0) -> np.ndarray:
    """Values (or physical derivatives) at reference points ``s x t`` in
    every element, shape (M, N, len(s), len(t))."""
    s, t = np.atleast_1d(np.asarray(s, dtype=float)), np.atleast_1d(np.asarray(t, dtype=float))
    if isinstance(obj, CoefficientField):
        return obj.on_elements(s, t, dx, dy)
    px, py = mesh.px, mesh.py
    X = (px.coords[:-1, None] + 0.5 * px.gaps[:, None] * (s + 1))[:, None, :, None]
    Y = (py.coords[:-1, None] + 0.5 * py.gaps[:, None] * (t + 1))[None, :, None, :]
    out = broadcast(obj.derivative(dx, dy), X, Y)
    return np.broadcast_to(out, (mesh.M, mesh.N, s.size, t.size))


def _diff(field, reference, mesh, s, t, dx=0, dy=0):
    return sample(reference, mesh, s, t, dx, dy) - sample(field, mesh, s, t, dx, dy)


def node_errors(field: Reference, exact: Reference, mesh: TensorMesh):
    """RMS value and gradient errors over interior nodes, normalized by 1/(MN).

    Returns ``(None, None)`` when the mesh has no interior node.
    """
    M, N = mesh.M, mesh.N
    if M < 2 or N < 2:
        return None, None
    # interior node (i, j) is the lower-left corner of element (i, j), i, j >= 1
    corner = np.array([-1.0])
    e = _diff(field, exact, mesh, corner, corner)[1:, 1:]
    ex = _diff(field, exact, mesh, corner, corner, 1, 0)[1:, 1:]
    ey = _diff(field, exact, mesh, corner, corner, 0, 1)[1:, 1:]
    e_un = math.sqrt(np.sum(e ** 2) / (M * N))
    e_gradn = math.sqrt(np.sum(ex ** 2 + ey ** 2) / (M * N))
    return e_un, e_gradn


@dataclass
class JacobiPointErrors:
    e_uJ: Optional[float]
    e_u_max: Optional[float]
    e_uJ_rms: Optional[float]


def jacobi_point_errors(field: Reference, exact: Reference, mesh: TensorMesh,
                        k: int) -> JacobiPointErrors:
    """Value errors at the tensor roots of J_{k+1}^{-2,-2} in every element.

    ``e_uJ`` uses the 1/(MN) normalization even when an element holds more
    than one point; ``e_uJ_rms`` is the plain per-point RMS.  All entries are
    None for k = 3, where the point set is empty.
    """
    roots = node_sets(k).jacobi_roots
    if roots.size == 0:
        return JacobiPointErrors(None, None, None)
    e = _diff(field, exact, mesh, roots, roots)
    sq = float(np.sum(e ** 2))
    return JacobiPointErrors(
        e_uJ=math.sqrt(sq / (mesh.M * mesh.N)),
        e_u_max=float(np.max(np.abs(e))),
        e_uJ_rms=math.sqrt(sq / e.size),
    )


@dataclass
class LineErrors:
    e_gradl: float
    e_lapg: float
    e_grad_max: float
    e_lap_max: float


def _line_mean(err_sq: np.ndarray, axis: str) -> float:
    # one line per (cell, reference abscissa); samples run along the other axis
    if axis == "x":
        per_line = err_sq.mean(axis=(1, 3))
    else:
        per_line = err_sq.mean(axis=(0, 2))
    return float(per_line.sum() / per_line.size)


def line_errors(field: Reference, exact: Reference, mesh: TensorMesh, k: int,
                samples_per_cell: int | None = None) -> LineErrors:
    """Derivative errors on Lobatto lines (first order) and Gauss lines
    (second order), plus the mixed derivative at tensor Lobatto points.

    Each line is sampled at ``samples_per_cell`` Gauss points per transverse
    element (default k+1).  Lines on element interfaces are sampled from both
    adjacent elements.
    """
    ns = k + 1 if samples_per_cell is None else samples_per_cell
    if ns < 1:
        raise ValueError("samples_per_cell must be >= 1")
    sets = node_sets(k)
    lob, gp = sets.lobatto_pts, sets.gauss_pts
    g = gauss_rule(ns).nodes

    gx = _diff(field, exact, mesh, lob, g, 1, 0)
    gy = _diff(field, exact, mesh, g, lob, 0, 1)
    lxx = _diff(field, exact, mesh, gp, g, 2, 0)
    lyy = _diff(field, exact, mesh, g, gp, 0, 2)
    lxy = _diff(field, exact, mesh, lob, lob, 1, 1)

    e_gradl = math.sqrt(_line_mean(gx ** 2, "x") + _line_mean(gy ** 2, "y"))
    e_lapg = math.sqrt(_line_mean(lxx ** 2, "x") + _line_mean(lyy ** 2, "y"))
    e_grad_max = float(np.abs(gx).max() + np.abs(gy).max())
    e_lap_max = float(np.abs(lxx).max() + np.abs(lyy).max() + np.abs(lxy).max())
    return LineErrors(e_gradl, e_lapg, e_grad_max, e_lap_max)


def sobolev_errors(field: Reference, reference: Reference, mesh: TensorMesh,
                   quad=None, k: int | None = None) -> tuple[float, float, float]:
    """Full L2, H1 and broken H2 norms of ``reference - field``.

    Elementwise Gauss quadrature with ``quad`` points per direction (default
    k+3).  The H2 seminorm uses the Frobenius norm of the Hessian.
    """
    if quad is None:
        if k is None:
            src = field if isinstance(field, CoefficientField) else reference
            k = src.space.k
        quad = k + 3
    rule = gauss_rule(int(quad)) if not hasattr(quad, "nodes") else quad
    s, w = np.asarray(rule.nodes), np.asarray(rule.weights)
    jac = 0.25 * mesh.px.gaps[:, None] * mesh.py.gaps[None, :]
    W = w[:, None] * w[None, :] * jac[:, :, None, None]

    def integral(dx, dy):
        return float(np.sum(W * _diff(field, reference, mesh, s, s, dx, dy) ** 2))

    l2 = integral(0, 0)
    h1 = l2 + integral(1, 0) + integral(0, 1)
    h2 = h1 + integral(2, 0) + integral(0, 2) + 2 * integral(1, 1)
    return math.sqrt(l2), math.sqrt(h1), math.sqrt(h2)


@dataclass
class ErrorReport:
    h_max: float
    n_dof: int
    L2: float
    H1: float
    H2: float
    e_un: Optional[float]
    e_gradn: Optional[float]
    e_uJ: Optional[float]
    e_gradl: float
    e_lapg: float
    e_u_max: Optional[float]
    e_grad_max: float
    e_lap_max: float
    sc_L2: Optional[float] = None
    sc_H1: Optional[float] = None
    sc_H2: Optional[float] = None
    e_uJ_rms: Optional[float] = None

    def as_dict(self) -> dict:
        return asdict(self)


ERROR_COLUMNS = ("L2", "H1", "H2", "e_un", "e_gradn", "e_uJ", "e_gradl", "e_lapg",
                 "e_u_max", "e_grad_max", "e_lap_max", "sc_L2", "sc_H1", "sc_H2")


def error_report(u_h: CoefficientField, exact: Exact, mesh: TensorMesh,
                 u_I: CoefficientField | None = None,
                 samples_per_cell: int | None = None, quad=None) -> ErrorReport:
    k = u_h.space.k
    L2, H1, H2 = sobolev_errors(u_h, exact, mesh, quad)
    e_un, e_gradn = node_errors(u_h, exact, mesh)
    jp = jacobi_point_errors(u_h, exact, mesh, k)
    le = line_errors(u_h, exact, mesh, k, samples_per_cell)
    sc = sobolev_errors(u_h, u_I, mesh, quad) if u_I is not None else (None, None, None)
    return ErrorReport(
        h_max=mesh.h, n_dof=u_h.space.dim, L2=L2, H1=H1, H2=H2,
        e_un=e_un, e_gradn=e_gradn, e_uJ=jp.e_uJ,
        e_gradl=le.e_gradl, e_lapg=le.e_lapg,
        e_u_max=jp.e_u_max, e_grad_max=le.e_grad_max, e_lap_max=le.e_lap_max,
        sc_L2=sc[0], sc_H1=sc[1], sc_H2=sc[2], e_uJ_rms=jp.e_uJ_rms,
    )


def observed_order(e_prev, e_cur, h_prev, h_cur, floor: float = RATE_FLOOR):
    """log(e_prev/e_cur) / log(h_prev/h_cur), or None when masked."""
    if e_prev is None or e_cur is None:
        return None
    if not (e_prev >= floor and e_cur >= floor):
        return None
    return math.log(e_prev / e_cur) / math.log(h_prev / h_cur)


def rate_table(levels: Sequence[tuple[float, object]],
               columns: Sequence[str] = ERROR_COLUMNS,
               floor: float = RATE_FLOOR) -> dict[str, list[Optional[float]]]:
    """Observed orders between consecutive levels for each metric.

    ``levels`` holds ``(h_max, report)`` pairs; a report may be an
    :class:`ErrorReport` or a mapping.  Entries whose error is below
    ``floor`` or absent come back as None.
    """
    if len(levels) < 2:
        raise ValueError("need at least two levels to compute rates")
    hs = [h for h, _ in levels]
    if any(h1 >= h0 for h0, h1 in zip(hs, hs[1:])):
        raise ValueError(f"mesh sizes must be strictly decreasing, got {hs}")

    def get(rep, name):
        return rep.get(name) if isinstance(rep, dict) else getattr(rep, name)

    table = {}
    for name in columns:
        table[name] = [observed_order(get(r0, name), get(r1, name), h0, h1, floor)
                       for (h0, r0), (h1, r1) in zip(levels, levels[1:])]
    return table


__all__ = ["ErrorReport", "JacobiPointErrors", "LineErrors", "RATE_FLOOR", "ERROR_COLUMNS",
           "sample", "node_errors", "jacobi_point_errors", "line_errors", "sobolev_errors",
           "error_report", "observed_order", "rate_table"]
