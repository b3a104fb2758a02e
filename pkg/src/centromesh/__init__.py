"""Centrosymmetric meshing and half-size solves for finite-difference Poisson problems."""

from .assembly import (
    DIRICHLET,
    FACES,
    NEUMANN,
    BcSpec,
    CentroCheck,
    FaceBC,
    LinearSystem,
    StencilRow,
    assemble,
    is_centrosymmetric,
    reflect_field,
    stencil_row,
)
from .centro import (
    CentroBlocks,
    CentroInverse,
    centro_inverse,
    centro_solve,
    exchange,
    factorize,
    split_blocks,
    storage_accounting,
)
from .errors import (
    CentromeshError,
    ConfigurationError,
    InputDomainError,
    SingularityError,
    StructureError,
)
from .mesh import CENTROSYMMETRIC, CLASSICAL, GridSpec, NodeId, Numbering, build_numbering, mirror_node
from .oracle import convergence_study, dense_inverse, dense_solve
from .report import SolveReport

__version__ = "0.1.0"
