"""Centrosymmetric matrices: block split, half-size inverse and split solve.

A centrosymmetric matrix of rank ``2N`` has the block form::

    A = [[B,  C J],
         [J C, J B J]]

with ``J`` the rank-``N`` exchange matrix. Its inverse has the same form with
blocks ``D = ((B+C)^-1 + (B-C)^-1) / 2`` and ``E = ((B+C)^-1 - (B-C)^-1) / 2``,
so only the two rank-``N`` matrices ``B+C`` and ``B-C`` are ever factorized.
``J`` is never built; it is applied by reversing indices.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import is_centrosymmetric
from .errors import InputDomainError, SingularityError, StructureError
from .report import SolveReport, relative_residual

__all__ = [
    "COND_LIMIT",
    "exchange",
    "CentroBlocks",
    "CentroInverse",
    "CentroFactorization",
    "split_blocks",
    "factorize",
    "centro_inverse",
    "centro_solve",
    "storage_accounting",
]

COND_LIMIT = 1e12
_EPS = np.finfo(float).eps

_SINGULAR_HINT = (
    "an all-Neumann boundary configuration produces exactly this failure, since "
    "the solution is then only defined up to an additive constant"
)


def exchange(x, axis: int = 0):
    """Apply ``J`` along ``axis``: reverse the order of the entries."""
    x = np.asarray(x)
    return np.flip(x, axis=axis)


@dataclass(frozen=True)
class CentroBlocks:
    """The ``(B, C)`` pair with ``A = [[B, C J], [J C, J B J]]``."""

    B: object
    C: object

    def __post_init__(self):
        if self.B.shape != self.C.shape or self.B.shape[0] != self.B.shape[1]:
            raise InputDomainError(
                f"B and C must be square and of equal shape, got {self.B.shape} and {self.C.shape}"
            )

    @property
    def n_half(self) -> int:
        return self.B.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.B)

    def reconstruct(self) -> np.ndarray:
        """Dense rank-``2N`` matrix represented by the blocks."""
        B = self.B.toarray() if sp.issparse(self.B) else np.asarray(self.B)
        C = self.C.toarray() if sp.issparse(self.C) else np.asarray(self.C)
        return np.block([[B, C[:, ::-1]], [C[::-1, :], B[::-1, ::-1]]])

    def matvec(self, x):
        """``A @ x`` without forming ``A``."""
        x = np.asarray(x, dtype=float)
        n = self.n_half
        if x.shape[0] != 2 * n:
            raise InputDomainError(f"vector length {x.shape[0]} does not match rank {2 * n}")
        x1, jx2 = x[:n], exchange(x[n:])
        top = self.B @ x1 + self.C @ jx2
        bottom = exchange(self.C @ x1 + self.B @ jx2)
        return np.concatenate([top, bottom])


@dataclass(frozen=True)
class CentroInverse:
    """The ``(D, E)`` pair with ``A^-1 = [[D, E J], [J E, J D J]]``."""

    D: np.ndarray
    E: np.ndarray

    @property
    def n_half(self) -> int:
        return self.D.shape[0]

    def matrix(self) -> np.ndarray:
        D, E = self.D, self.E
        return np.block([[D, E[:, ::-1]], [E[::-1, :], D[::-1, ::-1]]])

    def storage(self) -> int:
        """Number of stored scalars, ``2 N^2``."""
        return int(self.D.size + self.E.size)


def storage_accounting(n_half: int) -> dict:
    """Scalar counts of the block inverse against the dense inverse."""
    n_half = int(n_half)
    centro = 2 * n_half * n_half
    dense = (2 * n_half) ** 2
    return {"n_half": n_half, "centro": centro, "dense": dense, "ratio": dense / centro}


def split_blocks(A, tol: float = 1e-12, relative: bool = True) -> CentroBlocks:
    """Extract ``B = A[:N, :N]`` and ``C = A[:N, N:] J`` from a centrosymmetric ``A``.

    Raises :class:`StructureError` carrying the check report if ``A`` is not
    centrosymmetric within ``tol``.
    """
    check = is_centrosymmetric(A, tol, relative=relative)
    if not check:
        raise StructureError(f"cannot split blocks: {check.describe()}", report=check)
    n = A.shape[0] // 2
    if sp.issparse(A):
        A = sp.csr_array(A)
        B = A[:n, :n]
        C = A[:n, n:][:, np.arange(n)[::-1]]
        return CentroBlocks(sp.csr_array(B), sp.csr_array(C))
    A = np.asarray(A, dtype=float)
    return CentroBlocks(A[:n, :n].copy(), A[:n, n:][:, ::-1].copy())


def _factor(M, name: str):
    """Partial-pivoted LU of ``M``; returns ``(solve, rcond)``."""
    if sp.issparse(M):
        M = sp.csc_array(M)
        try:
            lu = spla.splu(M)
        except RuntimeError as exc:
            raise SingularityError(f"{name} is singular ({exc}); {_SINGULAR_HINT}", factor=name) from None
        if M.shape[0] == 0:
            return lu.solve, 1.0
        inv_norm = spla.onenormest(
            spla.LinearOperator(M.shape, matvec=lu.solve, rmatvec=lambda y: lu.solve(y, trans="T"))
        )
        anorm = spla.norm(M, 1)
        rcond = 1.0 / (anorm * inv_norm) if anorm * inv_norm > 0 else 0.0
        return lu.solve, rcond

    M = np.asarray(M, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M)
    if M.shape[0] == 0:
        return (lambda y: np.asarray(y, dtype=float)), 1.0
    anorm = np.linalg.norm(M, 1)
    if anorm == 0 or np.any(np.diag(lu) == 0):
        rcond = 0.0
    else:
        (gecon,) = sla.get_lapack_funcs(("gecon",), (lu,))
        rcond, _ = gecon(lu, anorm, norm="1")
    return (lambda y: sla.lu_solve((lu, piv), y)), float(rcond)


@dataclass
class CentroFactorization:
    """LU factors of ``B+C`` and ``B-C``, reusable across right-hand sides."""

    blocks: CentroBlocks
    _plus: object
    _minus: object
    condition: dict
    warnings: list
    factor_time: float

    @property
    def n_half(self) -> int:
        return self.blocks.n_half

    def solve(self, b):
        b = np.asarray(b, dtype=float)
        n = self.n_half
        if b.shape[0] != 2 * n:
            raise InputDomainError(f"right-hand side has length {b.shape[0]}, expected {2 * n}")
        b1, jb2 = b[:n], exchange(b[n:])
        u = self._plus(b1 + jb2)
        v = self._minus(b1 - jb2)
        return np.concatenate([0.5 * (u + v), exchange(0.5 * (u - v))])


def factorize(blocks: CentroBlocks, cond_limit: float = COND_LIMIT) -> CentroFactorization:
    """Factorize the two half-size matrices ``B+C`` and ``B-C``.

    A factor whose reciprocal condition estimate is at or below machine
    epsilon raises :class:`SingularityError`; one whose condition estimate
    exceeds ``cond_limit`` only adds a warning.
    """
    t0 = time.perf_counter()
    factors, condition, notes = {}, {}, []
    for name, M in (("B+C", blocks.B + blocks.C), ("B-C", blocks.B - blocks.C)):
        solve, rcond = _factor(M, name)
        if not rcond > _EPS:
            raise SingularityError(
                f"{name} is numerically singular (rcond={rcond:.3g}); {_SINGULAR_HINT}", factor=name
            )
        cond = 1.0 / rcond
        condition[name] = cond
        if cond > cond_limit:
            notes.append(f"{name} is ill-conditioned: estimated condition number {cond:.3g} > {cond_limit:.3g}")
        factors[name] = solve
    return CentroFactorization(
        blocks, factors["B+C"], factors["B-C"], condition, notes, time.perf_counter() - t0
    )


def centro_inverse(blocks: CentroBlocks, cond_limit: float = COND_LIMIT) -> CentroInverse:
    """Inverse of the centrosymmetric matrix as its ``(D, E)`` blocks."""
    fac = factorize(blocks, cond_limit)
    eye = np.eye(fac.n_half)
    P = fac._plus(eye)
    Q = fac._minus(eye)
    return CentroInverse(D=0.5 * (P + Q), E=0.5 * (P - Q))


def centro_solve(blocks: CentroBlocks, b, cond_limit: float = COND_LIMIT, report: bool = False):
    """Solve ``A x = b`` through two rank-``N`` solves.

    With ``b = (b1, b2)``, ``u = x1 + J x2`` solves ``(B+C) u = b1 + J b2``
    and ``v = x1 - J x2`` solves ``(B-C) v = b1 - J b2``.

    Returns ``x``, or ``(x, SolveReport)`` when ``report`` is true.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or b.shape[0] != 2 * blocks.n_half:
        raise InputDomainError(f"right-hand side must be a vector of length {2 * blocks.n_half}")
    rep = SolveReport("centro")
    fac = factorize(blocks, cond_limit)
    rep.timings["factorize"] = fac.factor_time
    with rep.phase("solve"):
        x = fac.solve(b)
    if not report:
        return x
    with rep.phase("residual"):
        rep.residual = relative_residual(blocks.matvec(x) - b, b)
    n = blocks.n_half
    rep.factor_sizes = {"B+C": n * n, "B-C": n * n}
    rep.condition = dict(fac.condition)
    rep.warnings = list(fac.warnings)
    return x, rep
