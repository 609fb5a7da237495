"""Space-time Maxwell solver on staggered Chebyshev grids.

Each electric component solves its own second-order wave system in space
and time (full grid or tensor train); the magnetic field follows from a
discrete Faraday law.
"""
from .export import export_solution, load_raw
from .faraday import CURL_TERMS, minus_curl, recover_magnetic, time_operator
from .kronsolve import KronSumSolver
from .pipeline import FieldSolution, MaxwellProblem, solve_maxwell, stagger_electric
from .spaces import B_COMPONENTS, E_COMPONENTS, Domain, StaggeredSpaces, build_staggered_spaces
from .wave import (
    DiscreteWaveSystem,
    InteriorSolution,
    Mode,
    WaveProblem,
    assemble_wave_system,
    boundary_maps,
    embed_boundary,
    embed_system,
    extract_interior,
    recover_time_derivative,
    sample,
    solve_dense,
    solve_full,
    solve_tt,
    wave_operator,
)

__all__ = [
    "B_COMPONENTS",
    "CURL_TERMS",
    "DiscreteWaveSystem",
    "Domain",
    "E_COMPONENTS",
    "FieldSolution",
    "InteriorSolution",
    "KronSumSolver",
    "MaxwellProblem",
    "Mode",
    "StaggeredSpaces",
    "WaveProblem",
    "assemble_wave_system",
    "boundary_maps",
    "build_staggered_spaces",
    "embed_boundary",
    "embed_system",
    "export_solution",
    "extract_interior",
    "load_raw",
    "minus_curl",
    "recover_magnetic",
    "recover_time_derivative",
    "sample",
    "solve_dense",
    "solve_full",
    "solve_maxwell",
    "solve_tt",
    "stagger_electric",
    "time_operator",
    "wave_operator",
]
