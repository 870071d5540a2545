"""Direct sparse LU solve of the nonsymmetric Petrov-Galerkin system."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import splu

from .assembly import SparseSystem, residual_check

RESIDUAL_TOL = 1e-10


class SolveError(RuntimeError):
    """The linear solve did not meet its residual contract."""


class SingularSystemError(SolveError):
    """LU factorization found the matrix singular to working precision.

    On the Petrov-Galerkin system this points at a mesh too coarse for unique
    solvability, or at an assembly bug.
    """


def solve_linear(system: SparseSystem, refine_steps: int = 3) -> np.ndarray:
    """Solve ``A c = b`` by SuperLU with partial pivoting.

    Up to ``refine_steps`` rounds of iterative refinement are applied if the
    scaled residual exceeds 1e-10.
    """
    A = sparse.csc_matrix(system.matrix)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"system is not square: {A.shape}")
    if not np.all(np.isfinite(A.data)) or not np.all(np.isfinite(system.rhs)):
        raise ValueError("system contains non-finite entries")
    try:
        lu = splu(A, permc_spec="COLAMD", diag_pivot_thresh=1.0)
    except RuntimeError as exc:
        raise SingularSystemError(f"LU factorization failed: {exc}") from exc
    if np.any(lu.U.diagonal() == 0):
        raise SingularSystemError("LU factorization has a zero pivot")

    c = lu.solve(system.rhs)
    if not np.all(np.isfinite(c)):
        raise SingularSystemError("LU solve produced non-finite values")
    res = residual_check(system, c)
    for _ in range(refine_steps):
        if res <= RESIDUAL_TOL:
            break
        c = c + lu.solve(system.rhs - system.matrix @ c)
        res = residual_check(system, c)
    if res > RESIDUAL_TOL:
        raise SolveError(f"scaled residual {res:.3e} exceeds {RESIDUAL_TOL:g}")
    return c
