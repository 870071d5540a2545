"""Manufactured convection-diffusion problems.

    -div(alpha grad u) + beta . grad u + gamma u = f  in (a,b) x (c,d),
    u = 0 on the boundary.

All callables take numpy arrays ``(x, y)`` and broadcast; constant
coefficients may return scalars.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Fn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Exact:
    u: Fn
    ux: Fn
    uy: Fn
    uxx: Fn
    uyy: Fn
    uxy: Fn

    def derivative(self, dx: int, dy: int) -> Fn:
        table = {(0, 0): self.u, (1, 0): self.ux, (0, 1): self.uy,
                 (2, 0): self.uxx, (0, 2): self.uyy, (1, 1): self.uxy}
        try:
            return table[(dx, dy)]
        except KeyError:
            raise ValueError(f"derivative ({dx}, {dy}) not available") from None


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    alpha: Fn
    grad_alpha: Callable
    beta: Callable
    gamma: Fn
    exact: Exact
    domain: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)
    constant_coefficients: bool = True
    div_beta: Optional[Fn] = None

    def check_conditions(self, n: int = 20) -> list[str]:
        """Sample the coefficient conditions on an ``n x n`` grid.

        Raises if alpha is not bounded away from zero; returns (and emits as
        warnings) violations of gamma >= 0 and gamma - div(beta)/2 >= 0.
        """
        a, b, c, d = self.domain
        X, Y = np.meshgrid(np.linspace(a, b, n), np.linspace(c, d, n), indexing="ij")
        alpha = broadcast(self.alpha, X, Y)
        if not np.all(alpha > 0):
            raise ValueError(f"{self.name}: alpha must be positive, min {alpha.min():g}")
        gamma = broadcast(self.gamma, X, Y)
        issues = []
        if np.any(gamma < 0):
            issues.append(f"{self.name}: gamma negative (min {gamma.min():g})")
        if self.div_beta is not None:
            margin = gamma - 0.5 * broadcast(self.div_beta, X, Y)
            if np.any(margin < 0):
                issues.append(f"{self.name}: gamma - div(beta)/2 negative (min {margin.min():g})")
        for msg in issues:
            warnings.warn(msg, stacklevel=2)
        return issues


def broadcast(fn: Fn, x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.broadcast_to(np.asarray(fn(x, y), dtype=float), np.broadcast(x, y).shape)


def _const(value: float) -> Fn:
    return lambda x, y: np.full(np.broadcast(x, y).shape, value)


def _const_vec(v1: float, v2: float):
    return lambda x, y: (_const(v1)(x, y), _const(v2)(x, y))


def separable(g, dg, ddg, h=None, dh=None, ddh=None) -> Exact:
    """Exact solution u(x, y) = g(x) h(y) from 1D factors and derivatives."""
    if h is None:
        h, dh, ddh = g, dg, ddg
    return Exact(
        u=lambda x, y: g(x) * h(y),
        ux=lambda x, y: dg(x) * h(y),
        uy=lambda x, y: g(x) * dh(y),
        uxx=lambda x, y: ddg(x) * h(y),
        uyy=lambda x, y: g(x) * ddh(y),
        uxy=lambda x, y: dg(x) * dh(y),
    )


def forcing(spec: ProblemSpec) -> Fn:
    """f = -alpha lap(u) - grad(alpha).grad(u) + beta.grad(u) + gamma u."""
    ex = spec.exact

    def f(x, y):
        ux, uy = ex.ux(x, y), ex.uy(x, y)
        ax, ay = spec.grad_alpha(x, y)
        bx, by = spec.beta(x, y)
        return (-spec.alpha(x, y) * (ex.uxx(x, y) + ex.uyy(x, y))
                - ax * ux - ay * uy + bx * ux + by * uy + spec.gamma(x, y) * ex.u(x, y))

    return f


_SINE = separable(lambda t: np.sin(np.pi * t),
                  lambda t: np.pi * np.cos(np.pi * t),
                  lambda t: -np.pi ** 2 * np.sin(np.pi * t))

_VARIANTS = {
    "A": (1.0, (1.0, 1.0), 1.0),
    "B": (1.0, (0.0, 0.0), 1.0),
    "C": (1.0, (1.0, 1.0), 0.0),
    "D": (1.0, (0.0, 0.0), 0.0),
}


def constant_problem(name: str, alpha: float, beta: tuple[float, float], gamma: float,
                     exact: Exact, domain=(0.0, 1.0, 0.0, 1.0)) -> ProblemSpec:
    return ProblemSpec(
        name=name,
        alpha=_const(alpha),
        grad_alpha=_const_vec(0.0, 0.0),
        beta=_const_vec(*beta),
        gamma=_const(gamma),
        exact=exact,
        domain=tuple(domain),
        constant_coefficients=True,
        div_beta=_const(0.0),
    )


def example1(variant: str = "A") -> ProblemSpec:
    """u = sin(pi x) sin(pi y) on the unit square, constant coefficients."""
    try:
        alpha, beta, gamma = _VARIANTS[variant.upper()]
    except KeyError:
        raise ValueError(f"unknown variant {variant!r}; expected one of A, B, C, D") from None
    return constant_problem(f"ex1{variant.lower()}", alpha, beta, gamma, _SINE)


def example2() -> ProblemSpec:
    """Variable coefficients alpha = e^{xy}, beta = (x^2 y, x y^2), gamma = 2xy,
    u = x y (1 - e^{x-1}) (1 - e^{y-1})."""
    g = lambda t: t * (1 - np.exp(t - 1))
    dg = lambda t: 1 - (1 + t) * np.exp(t - 1)
    ddg = lambda t: -(2 + t) * np.exp(t - 1)
    return ProblemSpec(
        name="ex2",
        alpha=lambda x, y: np.exp(x * y),
        grad_alpha=lambda x, y: (y * np.exp(x * y), x * np.exp(x * y)),
        beta=lambda x, y: (x * x * y, x * y * y),
        gamma=lambda x, y: 2 * x * y,
        exact=separable(g, dg, ddg),
        constant_coefficients=False,
        div_beta=lambda x, y: 4 * x * y,
    )


def bubble_problem(alpha=1.0, beta=(1.0, 1.0), gamma=1.0,
                   domain=(0.0, 1.0, 0.0, 1.0)) -> ProblemSpec:
    """Polynomial solution (x-a)(b-x)(y-c)(d-y), which lies in every Q_k, k >= 2."""
    a, b, c, d = domain
    exact = separable(lambda t: (t - a) * (b - t), lambda t: a + b - 2 * t,
                      lambda t: np.full(np.shape(t), -2.0),
                      lambda t: (t - c) * (d - t), lambda t: c + d - 2 * t,
                      lambda t: np.full(np.shape(t), -2.0))
    return constant_problem("bubble", alpha, beta, gamma, exact, domain)


def zero_problem(alpha=1.0, beta=(1.0, 1.0), gamma=1.0) -> ProblemSpec:
    zero = _const(0.0)
    return constant_problem("zero", alpha, beta, gamma, Exact(zero, zero, zero, zero, zero, zero))


PROBLEMS = {
    "ex1a": lambda: example1("A"),
    "ex1b": lambda: example1("B"),
    "ex1c": lambda: example1("C"),
    "ex1d": lambda: example1("D"),
    "ex2": example2,
}


def get_problem(problem_id: str) -> ProblemSpec:
    try:
        return PROBLEMS[problem_id]()
    except KeyError:
        raise ValueError(f"unknown problem {problem_id!r}; choose from {sorted(PROBLEMS)}") from None
