"""Plain-text exchange formats: MatrixMarket, dense CSV, vectors, mesh dumps.

Floats are written with ``repr`` (shortest round-trip form), so a write
followed by a read reproduces every value bit for bit.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .mesh import Numbering, mirror_node

MM_HEADER = "%%MatrixMarket matrix coordinate real general"


def _fmt(x) -> str:
    return repr(float(x))


def _triplets(A):
    """Nonzero ``(row, col, value)`` in row-major order."""
    if sp.issparse(A):
        coo = sp.coo_array(A)
        coo.sum_duplicates()
        r, c, v = coo.row, coo.col, coo.data
        keep = v != 0
        r, c, v = r[keep], c[keep], v[keep]
        order = np.lexsort((c, r))
        return r[order], c[order], v[order]
    A = np.asarray(A)
    r, c = np.nonzero(A)
    return r, c, A[r, c]


def write_matrix_market(path, A) -> Path:
    """Write ``A`` in MatrixMarket coordinate format with 1-based indices."""
    path = Path(path)
    n_rows, n_cols = A.shape
    r, c, v = _triplets(A)
    with open(path, "w", newline="\n") as fh:
        fh.write(MM_HEADER + "\n")
        fh.write(f"{n_rows} {n_cols} {len(v)}\n")
        for ri, ci, vi in zip(r, c, v):
            fh.write(f"{ri + 1} {ci + 1} {_fmt(vi)}\n")
    return path


def read_matrix_market(path, dense: bool | None = None):
    """Read a MatrixMarket file; returns an ndarray or a CSR array.

    By default the result is dense up to the assembly's dense limit.
    """
    from .assembly import DENSE_LIMIT

    M = scipy.io.mmread(str(path))
    if not sp.issparse(M):
        return np.asarray(M, dtype=float)
    if dense is None:
        dense = M.shape[0] <= DENSE_LIMIT
    return M.toarray().astype(float) if dense else sp.csr_array(M, dtype=float)


def write_dense_csv(path, A) -> Path:
    path = Path(path)
    A = A.toarray() if sp.issparse(A) else np.asarray(A)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in A:
            w.writerow([_fmt(x) for x in row])
    return path


def read_dense_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        return np.array([[float(x) for x in row] for row in csv.reader(fh)], dtype=float)


def write_vector(path, x) -> Path:
    """One value per line, in index order."""
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        for v in np.asarray(x, dtype=float).ravel():
            fh.write(_fmt(v) + "\n")
    return path


def read_vector(path) -> np.ndarray:
    with open(path) as fh:
        return np.array([float(line) for line in fh if line.strip()], dtype=float)


def write_blocks(prefix, blocks) -> tuple[Path, Path]:
    """Write ``B`` and ``C`` to ``<prefix>.B.mtx`` and ``<prefix>.C.mtx``."""
    prefix = str(prefix)
    return (
        write_matrix_market(prefix + ".B.mtx", blocks.B),
        write_matrix_market(prefix + ".C.mtx", blocks.C),
    )


def dump_mesh_csv(fh, numbering: Numbering) -> None:
    """Columns ``index, i, j, k, x, y, z, mirror_index``, one row per node."""
    grid = numbering.grid
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["index", "i", "j", "k", "x", "y", "z", "mirror_index"])
    for n in range(numbering.n_total):
        v = numbering.node(n)
        x, y, z = grid.coordinates(v)
        w.writerow([n, v.i, v.j, v.k, _fmt(x), _fmt(y), _fmt(z), numbering(mirror_node(grid, v))])


def write_mesh_csv(path, numbering: Numbering) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        dump_mesh_csv(fh, numbering)
    return path


def write_json(path, obj) -> Path:
    """JSON with insertion-ordered keys and a trailing newline."""
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
    return path
