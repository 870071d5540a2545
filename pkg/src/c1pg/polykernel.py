"""Polynomial families on the reference interval [-1, 1].

Legendre, classical Jacobi, the generalized Jacobi family J_n^{-2,-2}
(Hermite cubics for n <= 3, weighted (2,2)-Jacobi bubbles for n >= 4),
Lobatto polynomials, Gauss-Legendre rules and the special node sets used
for superconvergence sampling.

Every evaluator accepts a scalar or an array of reference coordinates and
returns a :class:`PolySample` holding the value and the first two
derivatives with respect to ``s``.  Physical chain-rule factors are the
caller's business.
"""
from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

MAX_DEGREE = 8


class PolySample(NamedTuple):
    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


class QuadRule(NamedTuple):
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values):
        return np.dot(self.weights, values)


class NodeSets(NamedTuple):
    jacobi_roots: np.ndarray
    lobatto_pts: np.ndarray
    gauss_pts: np.ndarray


def _as_array(s):
    return np.asarray(s, dtype=float)


def legendre(n: int, s) -> PolySample:
    """Legendre polynomial L_n with derivatives.

    Uses the three-term recurrence together with
    ``L'_{m+1} = L'_{m-1} + (2m+1) L_m`` (and its derivative), which stays
    accurate at the endpoints where the closed-form derivative divides by
    ``1 - s**2``.
    """
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    s = _as_array(s)
    p_prev, p = np.zeros_like(s), np.ones_like(s)
    dp_prev, dp = np.zeros_like(s), np.zeros_like(s)
    ddp_prev, ddp = np.zeros_like(s), np.zeros_like(s)
    for m in range(n):
        p_next = ((2 * m + 1) * s * p - m * p_prev) / (m + 1)
        dp_next = dp_prev + (2 * m + 1) * p
        ddp_next = ddp_prev + (2 * m + 1) * dp
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
        ddp_prev, ddp = ddp, ddp_next
    return PolySample(p, dp, ddp)


def _jacobi_value(r: float, l: float, n: int, s: np.ndarray) -> np.ndarray:
    if n < 0:
        return np.zeros_like(s)
    p_prev = np.ones_like(s)
    if n == 0:
        return p_prev
    p = (r + 1) + (r + l + 2) * (s - 1) / 2
    for m in range(2, n + 1):
        c = 2 * m + r + l
        a1 = 2 * m * (m + r + l) * (c - 2)
        a2 = (c - 1) * (r * r - l * l)
        a3 = (c - 2) * (c - 1) * c
        a4 = 2 * (m + r - 1) * (m + l - 1) * c
        p_prev, p = p, ((a2 + a3 * s) * p - a4 * p_prev) / a1
    return p


def jacobi(r: float, l: float, n: int, s) -> PolySample:
    """Classical Jacobi polynomial J_n^{r,l} (standard normalization).

    Derivatives come from ``d/ds J_n^{r,l} = (n+r+l+1)/2 J_{n-1}^{r+1,l+1}``.
    """
    if r <= -1 or l <= -1:
        raise ValueError(
            f"classical Jacobi parameters must exceed -1 (got r={r}, l={l}); "
            "use gjacobi for the (-2,-2) family")
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    s = _as_array(s)
    value = _jacobi_value(r, l, n, s)
    d1 = 0.5 * (n + r + l + 1) * _jacobi_value(r + 1, l + 1, n - 1, s)
    d2 = 0.25 * (n + r + l + 1) * (n + r + l + 2) * _jacobi_value(r + 2, l + 2, n - 2, s)
    return PolySample(value, d1, d2)


def _hermite(n: int, s: np.ndarray) -> PolySample:
    if n == 0:   # psi_{-1}: value 1 at s=-1
        return PolySample((s + 2) * (1 - s) ** 2 / 4, (3 * s * s - 3) / 4, 1.5 * s)
    if n == 1:   # psi_{1}: value 1 at s=1
        return PolySample((2 - s) * (1 + s) ** 2 / 4, (3 - 3 * s * s) / 4, -1.5 * s)
    if n == 2:   # chi_{-1}: slope 1 at s=-1
        return PolySample((s + 1) * (1 - s) ** 2 / 4, (3 * s * s - 2 * s - 1) / 4,
                          (6 * s - 2) / 4)
    # chi_{1}: slope 1 at s=1
    return PolySample((s - 1) * (1 + s) ** 2 / 4, (3 * s * s + 2 * s - 1) / 4,
                      (6 * s + 2) / 4)


def gjacobi(n: int, s) -> PolySample:
    """Generalized Jacobi polynomial J_n^{-2,-2}.

    Indices 0..3 are the Hermite cubics (psi_{-1}, psi_1, chi_{-1}, chi_1);
    for ``n >= 4`` this is ``(1 - s**2)**2 * J_{n-4}^{2,2}(s)``, which vanishes
    together with its first derivative at both endpoints.
    """
    if n < 0:
        raise ValueError(f"index must be non-negative, got {n}")
    s = _as_array(s)
    if n <= 3:
        return _hermite(n, s)
    w = (1 - s * s) ** 2
    dw = -4 * s * (1 - s * s)
    ddw = 12 * s * s - 4
    j = jacobi(2, 2, n - 4, s)
    return PolySample(w * j.value,
                      dw * j.value + w * j.d1,
                      ddw * j.value + 2 * dw * j.d1 + w * j.d2)


def lobatto(n: int, s) -> PolySample:
    """Lobatto polynomial phi_{n+1} = (L_{n+1} - L_{n-1}) / (2n + 1)."""
    if n < 1:
        raise ValueError(f"Lobatto index must be >= 1, got {n}")
    s = _as_array(s)
    hi = legendre(n + 1, s)
    lo = legendre(n - 1, s)
    mid = legendre(n, s)
    return PolySample((hi.value - lo.value) / (2 * n + 1), mid.value, mid.d1)


def _symmetrize(x: np.ndarray) -> np.ndarray:
    x = np.sort(x)
    return 0.5 * (x - x[::-1])


def _golub_welsch(m: int, a: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and normalized first eigenvector components for the symmetric
    Jacobi weight (1 - s**2)**a."""
    n = np.arange(1, m, dtype=float)
    off = np.sqrt(4 * n * (n + a) * (n + a) * (n + 2 * a)
                  / ((2 * n + 2 * a) ** 2 * (2 * n + 2 * a + 1) * (2 * n + 2 * a - 1)))
    nodes, vecs = eigh_tridiagonal(np.zeros(m), off)
    return nodes, vecs[0, :] ** 2


def _newton(poly, x: np.ndarray, steps: int = 2) -> np.ndarray:
    for _ in range(steps):
        v, dv = poly(x)
        x = x - v / dv
    return x


@lru_cache(maxsize=None)
def _gauss_rule(m: int) -> QuadRule:
    if m == 1:
        return QuadRule(np.array([0.0]), np.array([2.0]))
    nodes, _ = _golub_welsch(m, 0.0)
    nodes = _newton(lambda x: legendre(m, x)[:2], nodes)
    nodes = _symmetrize(nodes)
    dl = legendre(m, nodes).d1
    weights = 2.0 / ((1 - nodes ** 2) * dl ** 2)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(nodes, weights)


def gauss_rule(m: int) -> QuadRule:
    """m-point Gauss-Legendre rule (Golub-Welsch, Newton-polished)."""
    if m < 1:
        raise ValueError(f"node count must be >= 1, got {m}")
    return _gauss_rule(int(m))


@lru_cache(maxsize=None)
def _node_sets(k: int) -> NodeSets:
    if k == 3:
        roots = np.empty(0)
    elif k == 4:
        roots = np.zeros(1)
    else:
        roots, _ = _golub_welsch(k - 3, 2.0)
        roots = _symmetrize(_newton(lambda x: jacobi(2, 2, k - 3, x)[:2], roots))

    if k == 3:
        interior = np.zeros(1)
    else:
        # zeros of L'_{k-1} are the Gauss points of the (1,1) weight
        interior, _ = _golub_welsch(k - 2, 1.0)
        interior = _symmetrize(
            _newton(lambda x: legendre(k - 1, x)[1:], interior))
    lob = np.concatenate(([-1.0], interior, [1.0]))
    gauss = np.array(gauss_rule(k - 1).nodes)
    for arr in (roots, lob, gauss):
        arr.setflags(write=False)
    return NodeSets(roots, lob, gauss)


def node_sets(k: int) -> NodeSets:
    """Reference superconvergence node sets for trial degree ``k``.

    ``jacobi_roots``: the k-3 interior zeros of J_{k+1}^{-2,-2} (zeros of
    J_{k-3}^{2,2}); ``lobatto_pts``: the k zeros of d/ds J_{k+1}^{-2,-2}
    (endpoints included); ``gauss_pts``: the k-1 zeros of L_{k-1}.
    """
    if k < 3:
        raise ValueError(f"trial degree must be >= 3, got {k}")
    if k > MAX_DEGREE:
        raise ValueError(f"trial degree capped at {MAX_DEGREE}, got {k}")
    return _node_sets(int(k))


def shape_table(k: int, s, deriv: int = 0) -> np.ndarray:
    """Rows J_p^{-2,-2} (p = 0..k), or their ``deriv``-th derivative, at ``s``.

    Returns an array of shape ``(k + 1, len(s))``.
    """
    s = np.atleast_1d(_as_array(s))
    out = np.empty((k + 1, s.size))
    for p in range(k + 1):
        out[p] = gjacobi(p, s)[deriv]
    return out


def legendre_table(n_max: int, s) -> np.ndarray:
    """Rows L_0..L_{n_max} at ``s``; shape ``(n_max + 1, len(s))``."""
    s = np.atleast_1d(_as_array(s))
    out = np.empty((n_max + 1, s.size))
    for p in range(n_max + 1):
        out[p] = legendre(p, s).value
    return out
