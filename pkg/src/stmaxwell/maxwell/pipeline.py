"""End-to-end solve: three E wave systems, staggering, then B recovery."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ..chebyshev import interp_matrix
from ..kron import mode_product
from ..tt import AmenConfig, CrossConfig, TTTensor, tt_mode_product
from .faraday import recover_magnetic
from .spaces import B_COMPONENTS, E_COMPONENTS, Domain, StaggeredSpaces, build_staggered_spaces
from .wave import Mode, WaveProblem, assemble_wave_system, embed_system, solve_full, solve_tt

__all__ = ["MaxwellProblem", "FieldSolution", "stagger_electric", "solve_maxwell"]


@dataclass(frozen=True, eq=False)
class MaxwellProblem:
    """Everything the solver needs: one wave problem per E component and B(0)."""

    domain: Domain
    waves: Mapping[str, WaveProblem]
    b_initial: Mapping[str, Callable]
    c: float = 1.0
    eps0: float = 1.0

    def __post_init__(self):
        if set(self.waves) != set(E_COMPONENTS):
            raise ValueError(f"need wave problems for {E_COMPONENTS}")
        if set(self.b_initial) != set(B_COMPONENTS):
            raise ValueError(f"need initial B oracles for {B_COMPONENTS}")


@dataclass(frozen=True, eq=False)
class FieldSolution:
    mode: Mode
    spaces: StaggeredSpaces
    e: dict
    b: dict
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.spaces.N

    def component(self, name: str):
        return self.e[name] if name in self.e else self.b[name]

    def dense(self, name: str) -> np.ndarray:
        v = self.component(name)
        return v.full() if isinstance(v, TTTensor) else np.asarray(v)

    def ranks(self) -> dict:
        if self.mode is not Mode.TT:
            return {}
        return {k: list(self.component(k).ranks) for k in (*E_COMPONENTS, *B_COMPONENTS)}


def stagger_electric(values, spaces: StaggeredSpaces, comp: str):
    """Move E_i from the CGL wave grid to its staggered grid (CG along axis i)."""
    axis = E_COMPONENTS.index(comp) + 1
    m = interp_matrix(spaces.cgl[axis - 1], spaces.cg[axis - 1]).entries
    if isinstance(values, TTTensor):
        mats = [None] * 4
        mats[axis] = m
        return tt_mode_product(values, mats)
    return mode_product(np.asarray(values), m, axis)


def solve_maxwell(
    problem: MaxwellProblem,
    N: int,
    mode: Mode | str = Mode.FULL,
    tt_tol: float = 1e-11,
    amen: AmenConfig | None = None,
    cross: CrossConfig | None = None,
) -> FieldSolution:
    """Solve for E on the staggered grids and recover B.

    Raises
    ------
    SolverError
        If a full-mode wave solve misses its residual bound.
    """
    mode = Mode(mode)
    spaces = build_staggered_spaces(N, problem.domain)
    if mode is Mode.TT:
        amen = amen or AmenConfig(tol=tt_tol)
        cross = cross or CrossConfig(tol=tt_tol)
    e, meta = {}, {"N": spaces.N, "mode": mode.value, "tt_tol": tt_tol if mode is Mode.TT else None}
    residuals, sweeps, cross_info = {}, {}, {}
    t0 = time.perf_counter()
    for comp in E_COMPONENTS:
        sys = assemble_wave_system(problem.waves[comp], spaces, mode, tt_tol, cross)
        if mode is Mode.FULL:
            sol = solve_full(sys)
        else:
            sol = solve_tt(sys, amen)
            cross_info[comp] = {k: v for k, v in sys.info.items() if isinstance(v, dict)}
        residuals[comp] = sol.residual
        sweeps[comp] = sol.sweeps
        full = embed_system(sys, sol.values)
        e[comp] = stagger_electric(full, spaces, comp)
        if mode is Mode.TT:
            e[comp] = e[comp].round(tt_tol * 1e-2)
    t1 = time.perf_counter()
    b, binfo = recover_magnetic(e, spaces, problem.b_initial, mode, tt_tol, amen, cross)
    t2 = time.perf_counter()
    for comp in B_COMPONENTS:
        residuals[comp] = binfo[comp]
    meta.update(residuals=residuals, e_seconds=t1 - t0, b_seconds=t2 - t1)
    if mode is Mode.TT:
        meta.update(sweeps=sweeps, cross=cross_info)
    return FieldSolution(mode, spaces, e, b, meta)
