"""Collocated finite-volume Stokes discretizations on Cartesian grids.

Scalar fields are 1-D arrays indexed by cell ``j * nx + i``; vector fields are
``(cells, 2)`` arrays.
"""

from ._stokes_fv import (
    ConfigError,
    Error,
    Grid,
    GridMismatch,
    InvalidGrid,
    NumericalError,
    PartitionError,
    SaddleSystem,
    SchemeKind,
    SolveReport,
    SolveStatus,
    assemble,
    checkerboard,
    checkerboard_sweep,
    cluster_of,
    cluster_regularity,
    consistency,
    convergence,
    divergence,
    energy,
    gradient,
    gradient_dual_norm,
    h1_norm,
    infsup,
    jump_seminorm,
    l2_norm,
    laplacian,
    solution_errors,
    solve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
