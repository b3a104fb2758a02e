"""Structured box grids with a mirror plane and their node numberings.

The symmetry plane is perpendicular to ``z`` and sits half way between the
node layers ``k = nz/2 - 1`` and ``k = nz/2``, so an even ``nz`` is required
for no node to lie on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, InputDomainError

__all__ = [
    "CLASSICAL",
    "CENTROSYMMETRIC",
    "SCHEMES",
    "GridSpec",
    "NodeId",
    "Numbering",
    "mirror_node",
    "build_numbering",
]

CLASSICAL = "classical"
CENTROSYMMETRIC = "centrosymmetric"
SCHEMES = (CLASSICAL, CENTROSYMMETRIC)


class NodeId(NamedTuple):
    """Zero-based integer grid coordinates of a node."""

    i: int
    j: int
    k: int


@dataclass(frozen=True)
class GridSpec:
    """Uniform box mesh of ``nx * ny * nz`` nodes, mirrored across a z-plane.

    Node ``(i, j, k)`` sits at ``(i*hx, j*hy, k*hz)``.

    Parameters
    ----------
    nx, ny, nz : int
        Node counts per axis. ``nz`` must be even and at least 2.
    hx, hy, hz : float
        Positive spacings.
    sym_axis : str
        Axis normal to the mirror plane. Only ``"z"`` is supported; other
        orientations are handled by permuting axes before building the grid.
    """

    nx: int
    ny: int
    nz: int
    hx: float = 1.0
    hy: float = 1.0
    hz: float = 1.0
    sym_axis: str = "z"

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
                raise ConfigurationError(f"{name} must be an integer, got {n!r}")
            if n < 1:
                raise ConfigurationError(f"{name} must be >= 1, got {n}")
            object.__setattr__(self, name, int(n))
        if self.nz < 2:
            raise ConfigurationError(f"nz must be >= 2, got {self.nz}")
        if self.nz % 2:
            raise ConfigurationError(
                f"nz must be even so that no node lies on the mirror plane, got {self.nz}"
            )
        for name in ("hx", "hy", "hz"):
            h = float(getattr(self, name))
            if not np.isfinite(h) or h <= 0:
                raise ConfigurationError(f"{name} must be a positive finite number, got {h}")
            object.__setattr__(self, name, h)
        if self.sym_axis != "z":
            raise ConfigurationError(
                f"only sym_axis='z' is supported, got {self.sym_axis!r}; permute the axes instead"
            )

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def spacing(self) -> tuple[float, float, float]:
        return (self.hx, self.hy, self.hz)

    @property
    def n_total(self) -> int:
        """Total node count ``N'``."""
        return self.nx * self.ny * self.nz

    @property
    def n_half(self) -> int:
        """Node count ``N`` on one side of the mirror plane."""
        return self.n_total // 2

    @property
    def plane_z(self) -> float:
        """z-coordinate of the mirror plane."""
        return 0.5 * (self.nz - 1) * self.hz

    def contains(self, v) -> bool:
        i, j, k = v
        return 0 <= i < self.nx and 0 <= j < self.ny and 0 <= k < self.nz

    def check_node(self, v) -> NodeId:
        try:
            i, j, k = (int(c) for c in v)
        except (TypeError, ValueError):
            raise InputDomainError(f"node must be a triple of integers, got {v!r}") from None
        if not self.contains((i, j, k)):
            raise InputDomainError(f"node {(i, j, k)} outside grid {self.shape}")
        return NodeId(i, j, k)

    def coordinates(self, v) -> tuple[float, float, float]:
        i, j, k = v
        return (i * self.hx, j * self.hy, k * self.hz)

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Node coordinates along each axis."""
        return (
            np.arange(self.nx) * self.hx,
            np.arange(self.ny) * self.hy,
            np.arange(self.nz) * self.hz,
        )

    def nodes(self):
        """Iterate over every node, i fastest then j then k."""
        for k in range(self.nz):
            for j in range(self.ny):
                for i in range(self.nx):
                    yield NodeId(i, j, k)


def mirror_node(grid: GridSpec, v) -> NodeId:
    """Reflect ``v`` across the mirror plane: ``(i, j, k) -> (i, j, nz-1-k)``."""
    i, j, k = grid.check_node(v)
    return NodeId(i, j, grid.nz - 1 - k)


@dataclass(frozen=True)
class Numbering:
    """Bijection between grid nodes and linear indices ``0 .. N'-1``.

    ``index[i, j, k]`` is the linear index of a node and ``nodes[n]`` is the
    ``(i, j, k)`` row of the node carrying index ``n``.
    """

    grid: GridSpec
    scheme: str
    index: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)

    @property
    def n_total(self) -> int:
        return self.grid.n_total

    @property
    def n_half(self) -> int:
        return self.grid.n_half

    def __call__(self, v) -> int:
        i, j, k = self.grid.check_node(v)
        return int(self.index[i, j, k])

    def node(self, n: int) -> NodeId:
        if not 0 <= n < self.n_total:
            raise InputDomainError(f"index {n} outside [0, {self.n_total - 1}]")
        return NodeId(*(int(c) for c in self.nodes[n]))

    def mirror_index(self, n: int) -> int:
        """Index of the mirror image of the node numbered ``n``."""
        return self(mirror_node(self.grid, self.node(n)))

    def permutation_to(self, other: "Numbering") -> np.ndarray:
        """Array ``p`` with ``p[self(v)] = other(v)`` for every node ``v``."""
        if other.grid != self.grid:
            raise InputDomainError("numberings belong to different grids")
        p = np.empty(self.n_total, dtype=np.int64)
        p[self.index.ravel()] = other.index.ravel()
        return p


def _lexicographic(nx: int, ny: int, nz: int) -> np.ndarray:
    i, j, k = np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nz), indexing="ij")
    return i + j * nx + k * nx * ny


def build_numbering(grid: GridSpec, scheme: str = CENTROSYMMETRIC) -> Numbering:
    """Number the nodes of ``grid``.

    ``classical`` is plain lexicographic order (i fastest, then j, then k).
    ``centrosymmetric`` keeps that order on the lower half ``k < nz/2`` and
    gives each upper node the index ``N' - 1 - n`` where ``n`` is the index
    of its mirror image, so that mirror pairs always sum to ``N' - 1``.
    """
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown numbering scheme {scheme!r}; expected one of {SCHEMES}")
    nx, ny, nz = grid.shape
    index = _lexicographic(nx, ny, nz)
    if scheme == CENTROSYMMETRIC:
        upper = index[:, :, nz // 2 :]
        lower = index[:, :, : nz // 2]
        upper[...] = grid.n_total - 1 - lower[:, :, ::-1]
    index.setflags(write=False)

    nodes = np.empty((grid.n_total, 3), dtype=np.int64)
    ii, jj, kk = np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nz), indexing="ij")
    nodes[index.ravel()] = np.column_stack([ii.ravel(), jj.ravel(), kk.ravel()])
    nodes.setflags(write=False)
    return Numbering(grid=grid, scheme=scheme, index=index, nodes=nodes)
