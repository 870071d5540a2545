"""Tensor-product rectangular meshes, uniform or randomly perturbed."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Partition1D:
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float)
        if coords.ndim != 1 or coords.size < 2:
            raise ValueError("a partition needs at least two coordinates")
        if np.any(np.diff(coords) <= 0):
            raise ValueError("partition coordinates must be strictly increasing")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def a(self) -> float:
        return float(self.coords[0])

    @property
    def b(self) -> float:
        return float(self.coords[-1])

    @property
    def n_cells(self) -> int:
        return self.coords.size - 1

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.coords)

    @property
    def h(self) -> float:
        return float(self.gaps.max())

    @property
    def h_min(self) -> float:
        return float(self.gaps.min())

    @property
    def ratio(self) -> float:
        """Quasi-uniformity ratio h / h_min."""
        return self.h / self.h_min

    def interval(self, i: int) -> tuple[float, float]:
        return float(self.coords[i]), float(self.coords[i + 1])

    def locate(self, x) -> np.ndarray:
        """Cell index containing each ``x`` (right end maps to the last cell)."""
        idx = np.searchsorted(self.coords, x, side="right") - 1
        return np.clip(idx, 0, self.n_cells - 1)


@dataclass(frozen=True)
class Element:
    i: int
    j: int
    x: tuple[float, float]
    y: tuple[float, float]

    @property
    def hx(self) -> float:
        return self.x[1] - self.x[0]

    @property
    def hy(self) -> float:
        return self.y[1] - self.y[0]


@dataclass(frozen=True)
class TensorMesh:
    px: Partition1D
    py: Partition1D

    @property
    def M(self) -> int:
        return self.px.n_cells

    @property
    def N(self) -> int:
        return self.py.n_cells

    @property
    def h(self) -> float:
        return max(self.px.h, self.py.h)

    @property
    def h_min(self) -> float:
        return min(self.px.h_min, self.py.h_min)

    @property
    def ratio(self) -> float:
        return self.h / self.h_min

    @property
    def domain(self) -> tuple[float, float, float, float]:
        return self.px.a, self.px.b, self.py.a, self.py.b

    def element(self, i: int, j: int) -> Element:
        if not (0 <= i < self.M and 0 <= j < self.N):
            raise IndexError(f"element ({i}, {j}) outside {self.M}x{self.N} mesh")
        return Element(i, j, self.px.interval(i), self.py.interval(j))

    def elements(self):
        for i in range(self.M):
            for j in range(self.N):
                yield self.element(i, j)

    def contains(self, x, y, tol: float = 1e-13) -> np.ndarray:
        a, b, c, d = self.domain
        sx, sy = tol * (b - a), tol * (d - c)
        x, y = np.asarray(x), np.asarray(y)
        return (x >= a - sx) & (x <= b + sx) & (y >= c - sy) & (y <= d + sy)


def uniform_partition(M: int, a: float, b: float) -> Partition1D:
    if M < 1:
        raise ValueError(f"cell count must be >= 1, got {M}")
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    coords = a + (b - a) * np.arange(M + 1) / M
    coords[-1] = b
    return Partition1D(coords)


def _node_draw(seed: int, axis: int, index: int) -> float:
    # counter-based: the draw for a node depends only on (seed, axis, index)
    key = np.random.SeedSequence([seed, axis]).generate_state(2, dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key, counter=index))
    u = gen.random()
    while u == 0.0:
        u = gen.random()
    return u


def perturb_partition(p: Partition1D, eps: float, seed: int, axis: int = 0) -> Partition1D:
    """Perturb interior nodes by ``eps * (b-a)/M * sin(i*pi/M) * U_i``.

    ``U_i`` is uniform on (0, 1).  On a uniform partition of (0, 1) this is
    exactly ``x_i = i/M + eps/M sin(i pi/M) U_i``; endpoints stay fixed.
    """
    if not 0.0 <= eps < 0.5:
        raise ValueError(f"eps must lie in [0, 0.5), got {eps}")
    M = p.n_cells
    coords = np.array(p.coords)
    if eps == 0.0:
        return Partition1D(coords)
    scale = eps * (p.b - p.a) / M
    for i in range(1, M):
        coords[i] += scale * np.sin(i * np.pi / M) * _node_draw(seed, axis, i)
    return Partition1D(coords)


def tensor_mesh(M: int, N: int | None = None,
                domain: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0),
                eps: float = 0.0, seed: int = 0) -> TensorMesh:
    """Uniform ``M x N`` mesh of ``domain``, each axis perturbed independently."""
    N = M if N is None else N
    a, b, c, d = domain
    px = perturb_partition(uniform_partition(M, a, b), eps, seed, axis=0)
    py = perturb_partition(uniform_partition(N, c, d), eps, seed, axis=1)
    return TensorMesh(px, py)


def to_reference(interval: tuple[float, float], x):
    x0, x1 = interval
    return (2 * np.asarray(x, dtype=float) - x0 - x1) / (x1 - x0)


def from_reference(interval: tuple[float, float], s):
    x0, x1 = interval
    return 0.5 * (x0 + x1 + (x1 - x0) * np.asarray(s, dtype=float))
