"""Reference solvers that assume nothing about matrix structure.

``dense_solve`` and ``dense_inverse`` use a plain partial-pivoted Gaussian
elimination written out here, so checks against them do not route through
the factorization used by :mod:`centromesh.centro`.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import DIRICHLET, FACES, NEUMANN, BcSpec, FaceBC, assemble
from .errors import InputDomainError, SingularityError
from .mesh import CLASSICAL, GridSpec, build_numbering
from .report import SolveReport, relative_residual

__all__ = [
    "SolveReport",
    "gaussian_elimination",
    "dense_solve",
    "dense_inverse",
    "ConvergenceResult",
    "convergence_study",
]


def _as_dense(A) -> np.ndarray:
    A = A.toarray() if sp.issparse(A) else np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputDomainError(f"matrix must be square, got shape {A.shape}")
    return A


def gaussian_elimination(A, B) -> np.ndarray:
    """Solve ``A X = B`` by row-pivoted elimination and back substitution.

    ``B`` may be a vector or a matrix of right-hand sides. A pivot not
    exceeding ``n * eps * max|A|`` is treated as singular.
    """
    M = _as_dense(A)
    n = M.shape[0]
    rhs = np.array(B, dtype=float)
    vector = rhs.ndim == 1
    if vector:
        rhs = rhs[:, None]
    if rhs.shape[0] != n:
        raise InputDomainError(f"right-hand side has {rhs.shape[0]} rows, matrix has {n}")
    tiny = n * np.finfo(float).eps * (np.abs(M).max() if n else 0.0)

    for k in range(n):
        p = k + int(np.argmax(np.abs(M[k:, k])))
        if abs(M[p, k]) <= tiny:
            raise SingularityError(f"matrix is singular: no usable pivot in column {k}", factor="A")
        if p != k:
            M[[k, p]] = M[[p, k]]
            rhs[[k, p]] = rhs[[p, k]]
        f = M[k + 1 :, k] / M[k, k]
        M[k + 1 :, k:] -= np.outer(f, M[k, k:])
        rhs[k + 1 :] -= np.outer(f, rhs[k])

    X = np.empty_like(rhs)
    for k in range(n - 1, -1, -1):
        X[k] = (rhs[k] - M[k, k + 1 :] @ X[k + 1 :]) / M[k, k]
    return X[:, 0] if vector else X


def dense_solve(A, b, method: str = "gaussian"):
    """Solve ``A x = b`` on the full matrix.

    Parameters
    ----------
    A : (n, n) array_like or sparse
    b : (n,) array_like
    method : {"gaussian", "lapack"}
        ``"gaussian"`` runs :func:`gaussian_elimination`; ``"lapack"`` runs
        LAPACK ``getrf``/``getrs`` and is the fair baseline for timings.

    Returns
    -------
    x : ndarray
    report : SolveReport
    """
    rep = SolveReport(f"dense-{method}")
    M = _as_dense(A)
    b = np.asarray(b, dtype=float)
    if b.shape != (M.shape[0],):
        raise InputDomainError(f"right-hand side has shape {b.shape}, expected ({M.shape[0]},)")
    if method == "gaussian":
        with rep.phase("solve"):
            x = gaussian_elimination(M, b)
    elif method == "lapack":
        with rep.phase("factorize"), warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(M, check_finite=False)
        tiny = M.shape[0] * np.finfo(float).eps * (np.abs(M).max() if M.size else 0.0)
        if M.size and np.abs(np.diag(lu)).min() <= tiny:
            raise SingularityError("matrix is singular: zero pivot in LU", factor="A")
        with rep.phase("solve"):
            x = sla.lu_solve((lu, piv), b, check_finite=False)
    else:
        raise InputDomainError(f"unknown method {method!r}")
    rep.residual = relative_residual(M @ x - b, b)
    rep.factor_sizes = {"A": int(M.size)}
    return x, rep


def dense_inverse(A) -> np.ndarray:
    """Inverse of ``A``, one identity column per right-hand side."""
    M = _as_dense(A)
    return gaussian_elimination(M, np.eye(M.shape[0]))


@dataclass
class ConvergenceResult:
    """Per-level max-node errors of a manufactured-solution study.

    ``orders[i]`` compares level ``i`` with level ``i + 1`` and equals
    ``log2(e_i / e_{i+1})`` when the spacing halves exactly.
    """

    grids: list
    h: list
    errors: list
    orders: list = field(default_factory=list)


def _inward_fluxes(gradient, grid: GridSpec) -> dict:
    x, y, z = np.meshgrid(*grid.axes(), indexing="ij")
    g = [np.broadcast_to(np.asarray(c, dtype=float), grid.shape) for c in gradient(x, y, z)]
    return {
        "x_min": g[0], "x_max": -g[0],
        "y_min": g[1], "y_max": -g[1],
        "z_min": g[2], "z_max": -g[2],
    }


def convergence_study(
    exact_solution: Callable,
    levels,
    laplacian: Callable,
    gradient: Callable | None = None,
    bc_types: Mapping[str, str] | None = None,
) -> ConvergenceResult:
    """Measure the discretization error against a known solution.

    Parameters
    ----------
    exact_solution : callable
        ``f(x, y, z)`` evaluated on node coordinate arrays.
    levels : sequence of GridSpec
        Grids from coarse to fine.
    laplacian : callable
        ``rho = lap f`` as ``rho(x, y, z)``.
    gradient : callable, optional
        Returns ``(df/dx, df/dy, df/dz)``; needed when any face is Neumann.
    bc_types : mapping, optional
        Face name to boundary type. Defaults to Neumann on ``x_min`` and
        ``y_min`` with Dirichlet elsewhere.

    Returns
    -------
    ConvergenceResult
        Errors are ``max |x_n - f(node_n)|`` over all nodes.
    """
    if bc_types is None:
        bc_types = BcSpec.paper_example().types
    if gradient is None and NEUMANN in bc_types.values():
        raise InputDomainError("a gradient is required to build Neumann fluxes")

    grids, hs, errors = [], [], []
    for grid in levels:
        fluxes = _inward_fluxes(gradient, grid) if gradient is not None else {}
        faces = {}
        for name in FACES:
            if bc_types[name] == DIRICHLET:
                faces[name] = FaceBC(DIRICHLET, exact_solution)
            else:
                faces[name] = FaceBC(NEUMANN, fluxes[name])
        bc = BcSpec(**faces)
        numbering = build_numbering(grid, CLASSICAL)
        system = assemble(grid, numbering, bc, laplacian, storage="sparse")
        x = spla.spsolve(sp.csc_array(system.A), system.b)

        xx, yy, zz = np.meshgrid(*grid.axes(), indexing="ij")
        exact = np.broadcast_to(np.asarray(exact_solution(xx, yy, zz), dtype=float), grid.shape)
        exact_vec = np.empty(grid.n_total)
        exact_vec[numbering.index.ravel()] = exact.ravel()
        grids.append(grid)
        hs.append(max(grid.spacing))
        errors.append(float(np.abs(x - exact_vec).max()))

    orders = []
    for i in range(len(errors) - 1):
        e0, e1 = errors[i], errors[i + 1]
        if e0 > 0 and e1 > 0 and hs[i] != hs[i + 1]:
            orders.append(math.log(e0 / e1) / math.log(hs[i] / hs[i + 1]))
        else:
            orders.append(float("nan"))
    return ConvergenceResult(grids, hs, errors, orders)
