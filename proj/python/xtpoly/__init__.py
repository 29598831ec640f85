"""Space-time dG solver for coupled elastic / poroelastic waves on polygonal meshes."""

from ._core import (
    ElasticParams,
    ElasticSpeeds,
    ErrorReport,
    InstabilityError,
    Materials,
    ParseError,
    PolyMesh,
    PoroParams,
    PoroSpeeds,
    RECEIVER_COLUMNS,
    SolverError,
    TopologyError,
    ValidationError,
    assemble,
    elastic_speeds,
    generate_mesh,
    poro_speeds,
    read_mesh,
    run_config,
    run_config_text,
    solve_manufactured,
    time_matrices,
    validate_poro,
)

__all__ = [
    "ElasticParams",
    "ElasticSpeeds",
    "ErrorReport",
    "InstabilityError",
    "Materials",
    "ParseError",
    "PolyMesh",
    "PoroParams",
    "PoroSpeeds",
    "RECEIVER_COLUMNS",
    "SolverError",
    "TopologyError",
    "ValidationError",
    "assemble",
    "elastic_speeds",
    "generate_mesh",
    "poro_speeds",
    "read_mesh",
    "run_config",
    "run_config_text",
    "solve_manufactured",
    "time_matrices",
    "validate_poro",
]
