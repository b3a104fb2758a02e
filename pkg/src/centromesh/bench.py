"""Timing of the split solve against a full-size LU on the same system."""

from __future__ import annotations

import time

import numpy as np

from .assembly import BcSpec, assemble
from .centro import centro_solve, split_blocks, storage_accounting
from .errors import InputDomainError
from .mesh import CENTROSYMMETRIC, GridSpec, build_numbering
from .oracle import dense_solve

CSV_COLUMNS = (
    "n_total", "nx", "ny", "nz",
    "dense_time", "centro_time", "time_ratio", "speedup",
    "dense_storage", "centro_storage", "storage_ratio",
    "max_abs_diff", "dense_residual", "centro_residual",
)


def grid_for_size(n_total: int) -> GridSpec:
    """Most cube-like unit-box grid with ``n_total`` nodes and even ``nz``."""
    if n_total < 2 or n_total % 2:
        raise InputDomainError(f"node count must be even and >= 2, got {n_total}")
    best = None
    for nz in range(2, n_total + 1, 2):
        if n_total % nz:
            continue
        rest = n_total // nz
        for nx in range(1, rest + 1):
            if rest % nx:
                continue
            ny = rest // nx
            dims = (nx, ny, nz)
            score = (max(dims) / min(dims), -nz)
            if best is None or score < best[0]:
                best = (score, dims)
    nx, ny, nz = best[1]
    h = [1.0 / (n - 1) if n > 1 else 1.0 for n in (nx, ny, nz)]
    return GridSpec(nx, ny, nz, *h)


def _best_time(fn, repeats):
    best, out = float("inf"), None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_size(n_total: int, repeats: int = 5, rng=None) -> dict:
    """Time one full LU solve and one split solve at ``n_total`` unknowns.

    Source and boundary values are random, so nothing but the matrix is
    symmetric. Each timing is the best of ``repeats`` runs.
    """
    rng = np.random.default_rng(rng)
    grid = grid_for_size(n_total)
    rho = rng.uniform(-1, 1, grid.shape)
    values = {f: rng.uniform(-1, 1, grid.shape) for f in ("x_min", "x_max", "y_min", "y_max", "z_min", "z_max")}
    system = assemble(grid, build_numbering(grid, CENTROSYMMETRIC), BcSpec.paper_example(values), rho, storage="dense")
    A, b = system.A, system.b
    blocks = split_blocks(A, 0.0)

    dense_time, (xd, rep_d) = _best_time(lambda: dense_solve(A, b, method="lapack"), repeats)
    centro_time, xc = _best_time(lambda: centro_solve(blocks, b), repeats)
    store = storage_accounting(blocks.n_half)
    return {
        "n_total": n_total,
        "nx": grid.nx,
        "ny": grid.ny,
        "nz": grid.nz,
        "dense_time": dense_time,
        "centro_time": centro_time,
        "time_ratio": centro_time / dense_time,
        "speedup": dense_time / centro_time,
        "dense_storage": store["dense"],
        "centro_storage": store["centro"],
        "storage_ratio": store["ratio"],
        "max_abs_diff": float(np.abs(xd - xc).max()),
        "dense_residual": rep_d.residual,
        "centro_residual": float(np.linalg.norm(A @ xc - b) / np.linalg.norm(b)),
    }


def run_benchmark(sizes=(256, 512, 1024), repeats: int = 5, seed: int = 0) -> list[dict]:
    """Benchmark rows for each size, sequentially, from one seeded stream."""
    rng = np.random.default_rng(seed)
    return [bench_size(n, repeats, rng) for n in sizes]
