import numpy as np
import pytest

from centromesh.assembly import DIRICHLET, FACES, NEUMANN, BcSpec, FaceBC
from centromesh.mesh import GridSpec

PAPER_GRID = GridSpec(3, 3, 4, 1 / 2, 1 / 3, 1 / 4)


@pytest.fixture
def paper_grid():
    return PAPER_GRID


def random_bc_types(rng, allow_all_neumann=False):
    """Random face types with matching z faces."""
    while True:
        types = {f: rng.choice([DIRICHLET, NEUMANN]) for f in FACES}
        types["z_max"] = types["z_min"]
        if allow_all_neumann or DIRICHLET in types.values():
            return {k: str(v) for k, v in types.items()}


def random_grid(rng, max_nodes=400, integer_spacing=False):
    """Random grid with even nz, at most ``max_nodes`` nodes, every axis >= 2."""
    while True:
        nx, ny = rng.integers(2, 9, size=2)
        nz = 2 * rng.integers(1, 6)
        if nx * ny * nz <= max_nodes:
            break
    if integer_spacing:
        h = 1.0 / rng.choice([1, 2, 4], size=3)
    else:
        h = rng.uniform(0.3, 1.5, size=3)
    return GridSpec(int(nx), int(ny), int(nz), *h)


def random_problem(rng, max_nodes=400, allow_all_neumann=False, integer_spacing=False):
    """Grid, BcSpec and source with asymmetric random values everywhere."""
    grid = random_grid(rng, max_nodes, integer_spacing)
    types = random_bc_types(rng, allow_all_neumann)
    bc = BcSpec(**{f: FaceBC(types[f], rng.uniform(-2, 2, grid.shape)) for f in FACES})
    rho = rng.uniform(-5, 5, grid.shape)
    return grid, bc, rho


def random_centro_matrix(rng, n_half):
    """Well-conditioned centrosymmetric matrix of rank ``2 * n_half``."""
    shift = 4.0 * np.sqrt(n_half) + 2.0
    B = rng.normal(size=(n_half, n_half)) + shift * np.eye(n_half)
    C = rng.normal(size=(n_half, n_half))
    return np.block([[B, C[:, ::-1]], [C[::-1, :], B[::-1, ::-1]]]), B, C
