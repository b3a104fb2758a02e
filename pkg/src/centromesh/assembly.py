"""Finite-difference assembly of ``A x = b`` for the Poisson equation.

The operator is the 7-point Laplacian on a :class:`~centromesh.mesh.GridSpec`.
Every node keeps its own row: Dirichlet nodes get identity rows, Neumann
nodes have their ghost neighbour eliminated, so ``A`` always has rank ``N'``.

Neumann values are fluxes along the *inward* normal. On a face with spacing
``h`` the ghost value obeys ``f_inside - f_ghost = 2*h*q``, which doubles the
coefficient of the interior neighbour and adds ``2*q/h`` to ``b``.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, InputDomainError
from .mesh import GridSpec, NodeId, Numbering

__all__ = [
    "DIRICHLET",
    "NEUMANN",
    "FACES",
    "DENSE_LIMIT",
    "FaceBC",
    "BcSpec",
    "StencilRow",
    "LinearSystem",
    "CentroCheck",
    "node_values",
    "stencil_row",
    "assemble",
    "is_centrosymmetric",
    "reflect_field",
]

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
BC_TYPES = (DIRICHLET, NEUMANN)

# Order also fixes which Dirichlet value wins on edges and corners.
FACES = ("x_min", "x_max", "y_min", "y_max", "z_min", "z_max")
_AXIS_NAMES = ("x", "y", "z")

DENSE_LIMIT = 4096


def node_values(source, grid: GridSpec, what: str = "value") -> np.ndarray:
    """Expand a value source to an array of shape ``grid.shape``.

    ``source`` may be a scalar, an array of the grid's shape, a mapping keyed
    by ``(i, j, k)`` or a callable ``f(x, y, z)`` evaluated on the node
    coordinates. Mapping sources leave unlisted nodes as NaN so that a missing
    entry is caught when the value is actually needed.
    """
    shape = grid.shape
    if callable(source):
        x, y, z = np.meshgrid(*grid.axes(), indexing="ij")
        out = np.asarray(source(x, y, z), dtype=float)
        return np.broadcast_to(out, shape).copy()
    if isinstance(source, Mapping):
        out = np.full(shape, np.nan)
        for key, val in source.items():
            v = grid.check_node(key)
            out[v] = float(val)
        return out
    arr = np.asarray(source, dtype=float)
    if arr.ndim == 0:
        return np.full(shape, float(arr))
    if arr.shape != shape:
        raise ConfigurationError(f"{what} table has shape {arr.shape}, grid is {shape}")
    return arr.copy()


@dataclass(frozen=True)
class FaceBC:
    """Boundary condition on one box face.

    ``value`` is the Dirichlet value ``c`` or the inward Neumann flux ``q``,
    in any form accepted by :func:`node_values`.
    """

    type: str
    value: object = 0.0

    def __post_init__(self):
        kind = str(self.type).lower()
        if kind not in BC_TYPES:
            raise ConfigurationError(f"unknown boundary condition type {self.type!r}")
        object.__setattr__(self, "type", kind)


@dataclass(frozen=True)
class BcSpec:
    """Boundary conditions for the six faces of the box.

    The two faces cut by the mirror axis (``z_min`` and ``z_max``) must share
    a type. Their values are unconstrained.
    """

    x_min: FaceBC
    x_max: FaceBC
    y_min: FaceBC
    y_max: FaceBC
    z_min: FaceBC
    z_max: FaceBC

    def __post_init__(self):
        for name in FACES:
            face = getattr(self, name)
            if not isinstance(face, FaceBC):
                raise ConfigurationError(f"face {name} must be a FaceBC, got {face!r}")
        if self.z_min.type != self.z_max.type:
            raise ConfigurationError(
                f"boundary types on faces z_min ({self.z_min.type}) and z_max "
                f"({self.z_max.type}) differ; they must match the mirror symmetry"
            )

    @classmethod
    def from_types(cls, types: Mapping[str, str], values: Mapping[str, object] | None = None):
        values = values or {}
        return cls(**{f: FaceBC(types[f], values.get(f, 0.0)) for f in FACES})

    @classmethod
    def paper_example(cls, values: Mapping[str, object] | None = None):
        """Neumann on ``x_min`` and ``y_min``, Dirichlet on the other faces."""
        types = {f: DIRICHLET for f in FACES}
        types["x_min"] = types["y_min"] = NEUMANN
        return cls.from_types(types, values)

    def faces(self):
        return [(name, getattr(self, name)) for name in FACES]

    @property
    def types(self) -> dict[str, str]:
        return {name: face.type for name, face in self.faces()}

    @property
    def all_neumann(self) -> bool:
        return all(face.type == NEUMANN for _, face in self.faces())

    def check_grid(self, grid: GridSpec) -> None:
        for axis, n in enumerate(grid.shape):
            lo, hi = FACES[2 * axis], FACES[2 * axis + 1]
            if n == 1 and NEUMANN == getattr(self, lo).type == getattr(self, hi).type:
                raise ConfigurationError(
                    f"faces {lo} and {hi} are both Neumann but the grid has a single "
                    f"node along {_AXIS_NAMES[axis]}; no interior neighbour to fold the ghost onto"
                )


@dataclass
class StencilRow:
    """Coefficients of one matrix row before numbering.

    ``neighbors`` maps ``(axis, direction)`` with direction ``-1``/``+1`` to
    the coefficient of that neighbour; ``rhs`` is the row's ``b`` entry.
    """

    kind: str
    diagonal: float
    neighbors: dict = field(default_factory=dict)
    rhs: float = 0.0


def _face_value(values, face, v, grid):
    val = values[face][v]
    if np.isnan(val):
        raise ConfigurationError(f"no value given on face {face} for node {tuple(v)}")
    return val


def stencil_row(grid: GridSpec, bc: BcSpec, v, rho, values=None) -> StencilRow:
    """Row of the discrete system at node ``v``.

    ``rho`` is the source array of shape ``grid.shape``; ``values`` maps face
    names to value arrays and is computed from ``bc`` when omitted.
    """
    v = grid.check_node(v)
    if values is None:
        values = {name: node_values(face.value, grid, name) for name, face in bc.faces()}
    shape = grid.shape

    for axis in range(3):
        for side, face in ((0, FACES[2 * axis]), (shape[axis] - 1, FACES[2 * axis + 1])):
            if v[axis] == side and getattr(bc, face).type == DIRICHLET:
                return StencilRow(DIRICHLET, 1.0, {}, _face_value(values, face, v, grid))

    b = float(rho[v])
    if np.isnan(b):
        raise ConfigurationError(f"source undefined at node {tuple(v)}")
    neighbors = {}
    diagonal = 0.0
    kind = "interior"
    for axis, h in enumerate(grid.spacing):
        inv = 1.0 / (h * h)
        diagonal -= 2.0 * inv
        c, n = v[axis], shape[axis]
        for direction, face, inside in ((-1, FACES[2 * axis], c > 0), (1, FACES[2 * axis + 1], c < n - 1)):
            if inside:
                key = (axis, direction)
            else:
                # ghost folded onto the opposite neighbour
                kind = NEUMANN
                key = (axis, -direction)
                b += 2.0 * _face_value(values, face, v, grid) / h
            neighbors[key] = neighbors.get(key, 0.0) + inv
    return StencilRow(kind, diagonal, neighbors, b)


@dataclass
class LinearSystem:
    """Assembled system ``A x = b``.

    ``A`` is a dense ``ndarray`` for ``N' <= DENSE_LIMIT`` and a
    ``scipy.sparse`` CSR array otherwise. ``row_kinds[n]`` is one of
    ``"interior"``, ``"neumann"``, ``"dirichlet"``.
    """

    A: object
    b: np.ndarray
    numbering: Numbering
    row_kinds: np.ndarray
    singular_prone: bool = False
    notes: list = field(default_factory=list)

    @property
    def n_total(self) -> int:
        return self.b.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.A)

    def dense(self) -> np.ndarray:
        return self.A.toarray() if self.is_sparse else np.asarray(self.A)


def assemble(
    grid: GridSpec,
    numbering: Numbering,
    bc: BcSpec,
    rho=0.0,
    storage: str = "auto",
) -> LinearSystem:
    """Assemble the discrete Poisson problem ``lap f = rho``.

    Parameters
    ----------
    grid : GridSpec
    numbering : Numbering
        Any numbering of ``grid``; it only permutes rows and columns.
    bc : BcSpec
    rho : scalar, array, mapping or callable
        Source term, see :func:`node_values`.
    storage : {"auto", "dense", "sparse"}
        ``"auto"`` stores dense up to ``DENSE_LIMIT`` unknowns.

    Returns
    -------
    LinearSystem
    """
    if numbering.grid != grid:
        raise InputDomainError("numbering was built for a different grid")
    if storage not in ("auto", "dense", "sparse"):
        raise InputDomainError(f"unknown storage {storage!r}")
    bc.check_grid(grid)
    rho = node_values(rho, grid, "rho")
    values = {name: node_values(face.value, grid, name) for name, face in bc.faces()}

    n_total = grid.n_total
    index = numbering.index
    b = np.empty(n_total)
    kinds = np.empty(n_total, dtype=object)
    rows, cols, vals = [], [], []
    for n in range(n_total):
        v = NodeId(*(int(c) for c in numbering.nodes[n]))
        row = stencil_row(grid, bc, v, rho, values)
        b[n] = row.rhs
        kinds[n] = row.kind
        entries = {n: row.diagonal}
        for (axis, direction), coef in row.neighbors.items():
            w = list(v)
            w[axis] += direction
            entries[int(index[tuple(w)])] = coef
        for m in sorted(entries):
            rows.append(n)
            cols.append(m)
            vals.append(entries[m])

    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=float)
    if storage == "dense" or (storage == "auto" and n_total <= DENSE_LIMIT):
        A = np.zeros((n_total, n_total))
        A[rows, cols] = vals
    else:
        A = sp.coo_array((vals, (rows, cols)), shape=(n_total, n_total)).tocsr()

    system = LinearSystem(A=A, b=b, numbering=numbering, row_kinds=kinds)
    if bc.all_neumann:
        system.singular_prone = True
        system.notes.append(
            "all faces are Neumann: the solution is defined only up to a constant "
            "and the matrix is singular"
        )
    return system


@dataclass(frozen=True)
class CentroCheck:
    """Outcome of :func:`is_centrosymmetric`; truthy when the check passed.

    On failure ``violation`` is ``(r, c, A[r, c], A[N'-1-r, N'-1-c])`` for the
    first offending entry in row-major order.
    """

    ok: bool
    max_deviation: float
    tol: float
    violation: tuple | None = None
    rank: int = 0

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return f"centrosymmetric (max deviation {self.max_deviation:.3g} <= tol {self.tol:.3g})"
        r, c, a, m = self.violation
        n = self.rank
        return (
            f"not centrosymmetric: A[{r},{c}] = {a!r} but A[{n - 1 - r},{n - 1 - c}] = {m!r} "
            f"(max deviation {self.max_deviation:.3g} > tol {self.tol:.3g})"
        )


def is_centrosymmetric(A, tol: float = 0.0, relative: bool = False) -> CentroCheck:
    """Check ``|A[r, c] - A[n-1-r, n-1-c]| <= tol`` for every entry.

    With ``relative=True`` the tolerance is scaled by ``max |A|``. ``A`` may
    be dense or ``scipy.sparse`` and must be square with even rank.
    """
    if tol < 0:
        raise InputDomainError(f"tolerance must be non-negative, got {tol}")
    shape = A.shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise InputDomainError(f"matrix must be square, got shape {shape}")
    n = shape[0]
    if n % 2:
        raise InputDomainError(f"matrix rank must be even, got {n}")

    if sp.issparse(A):
        A = sp.csr_array(A)
        rev = np.arange(n)[::-1]
        diff = sp.coo_array(A - A[rev][:, rev])
        diff.sum_duplicates()
        amax = float(abs(A).max()) if A.nnz else 0.0
        eff = tol * amax if relative else tol
        mag = np.abs(diff.data)
        maxdev = float(mag.max()) if mag.size else 0.0
        bad = mag > eff
        if not bad.any():
            return CentroCheck(True, maxdev, eff, None, n)
        order = np.lexsort((diff.col[bad], diff.row[bad]))
        r, c = int(diff.row[bad][order[0]]), int(diff.col[bad][order[0]])
        a = float(A[r, c])
        m = float(A[n - 1 - r, n - 1 - c])
    else:
        A = np.asarray(A)
        amax = float(np.abs(A).max()) if A.size else 0.0
        eff = tol * amax if relative else tol
        dev = np.abs(A - A[::-1, ::-1])
        maxdev = float(dev.max()) if dev.size else 0.0
        if not (dev > eff).any():
            return CentroCheck(True, maxdev, eff, None, n)
        r, c = (int(x) for x in np.argwhere(dev > eff)[0])
        a, m = float(A[r, c]), float(A[n - 1 - r, n - 1 - c])
    return CentroCheck(False, maxdev, eff, (r, c, a, m), n)


def reflect_field(grid: GridSpec, values) -> np.ndarray:
    """Return ``g`` with ``g(v) = values(mirror(v))`` on every node."""
    arr = node_values(values, grid, "field")
    return arr[:, :, ::-1].copy()
