"""Space-time box and the staggered collocation grids of each field component."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..chebyshev import Grid, cg_grid, cgl_grid

__all__ = ["Domain", "StaggeredSpaces", "build_staggered_spaces", "E_COMPONENTS", "B_COMPONENTS"]

E_COMPONENTS = ("Ex", "Ey", "Ez")
B_COMPONENTS = ("Bx", "By", "Bz")


@dataclass(frozen=True)
class Domain:
    t: tuple = (0.0, 1.0)
    x: tuple = (0.0, 1.0)
    y: tuple = (0.0, 1.0)
    z: tuple = (0.0, 1.0)

    def __post_init__(self):
        for name in ("t", "x", "y", "z"):
            a, b = (float(v) for v in getattr(self, name))
            if not b > a:
                raise ValueError(f"{name}-interval must satisfy a < b")
            object.__setattr__(self, name, (a, b))

    @property
    def intervals(self) -> tuple:
        return (self.t, self.x, self.y, self.z)


@dataclass(frozen=True, eq=False)
class StaggeredSpaces:
    """Per-component grids, each a (t, x, y, z) tuple of :class:`Grid`.

    E_i uses N CG points along axis i and N+1 CGL points elsewhere; B_i uses
    N+1 CGL points along axis i and in time, N CG points on the other two
    space axes. Every component shares the single time grid object.
    """

    N: int
    domain: Domain
    t: Grid
    cgl: tuple
    cg: tuple
    grids: dict = field(repr=False)

    @property
    def wave_grids(self) -> tuple:
        """Full CGL grids on which the E wave equations are collocated."""
        return (self.t, *self.cgl)

    def shape(self, component: str) -> tuple:
        return tuple(g.n for g in self.grids[component])


def build_staggered_spaces(N: int, domain: Domain = Domain()) -> StaggeredSpaces:
    if int(N) != N or N < 3:
        raise ValueError(f"N must be an integer >= 3, got {N!r}")
    N = int(N)
    t = cgl_grid(N + 1, domain.t)
    cgl = tuple(cgl_grid(N + 1, iv) for iv in domain.intervals[1:])
    cg = tuple(cg_grid(N, iv) for iv in domain.intervals[1:])
    grids = {}
    for i in range(3):
        grids[E_COMPONENTS[i]] = (t, *(cg[a] if a == i else cgl[a] for a in range(3)))
        grids[B_COMPONENTS[i]] = (t, *(cgl[a] if a == i else cg[a] for a in range(3)))
    return StaggeredSpaces(N, domain, t, cgl, cg, grids)
