r"""
Tensor-Train Solves Against the Full Grid
=========================================
The full space-time grid has :math:`(N+1)^4` nodes per field component.
When the solution is close to a sum of a few separable terms, the
tensor-train (TT) format stores it with a handful of small cores instead.

This demo solves the same problem in both modes, compares the answers, and
reports the TT ranks and storage.
"""
#%%
# A rank-three field
# ------------------
# Case ``ex3`` sets :math:`E_z` to a sum of three separable terms with
# frequencies :math:`\pi, 2\pi, 3\pi`, so the exact field has TT rank three.
import time

import numpy as np

from stmaxwell.maxwell import Mode, solve_maxwell
from stmaxwell.verify import field_errors, get_case, relative_difference

case = get_case("ex3")
N, tol = 20, 1e-10

#%%
# Full grid
# ---------
t0 = time.perf_counter()
full = solve_maxwell(case.problem(), N, Mode.FULL)
t_full = time.perf_counter() - t0

#%%
# Tensor train
# ------------
# In TT mode the source and boundary data are sampled by cross
# interpolation, which reads only a few fibres of each function. The wave
# systems are solved by alternating minimal energy (AMEn) sweeps. The tolerance
# controls cross, rounding and the AMEn residual.
t0 = time.perf_counter()
tt = solve_maxwell(case.problem(), N, Mode.TT, tt_tol=tol)
t_tt = time.perf_counter() - t0

grids = full.spaces.grids
diff = relative_difference(full.e, tt.e, grids, ("Ex", "Ey", "Ez"))
diff.update(relative_difference(full.b, tt.b, grids, ("Bx", "By", "Bz")))
print(f"full: {t_full:.2f} s   TT: {t_tt:.2f} s")
print("max full-vs-TT difference:", f"{max(diff.values()):.2e}")

#%%
# Ranks and storage
# -----------------
for comp, ranks in tt.ranks().items():
    v = tt.component(comp)
    dense = np.prod(v.mode_sizes) * 8
    print(f"{comp}: ranks {ranks}  {v.nbytes / 1e3:7.1f} kB  (dense {dense / 1e3:7.1f} kB)")

#%%
# The stored ranks exceed three. AMEn stops at a residual near the
# tolerance, and the leftover error is not separable, so a few extra rank
# directions are needed to carry it. Storage is still a small fraction of
# the dense grid, and the gap grows like :math:`N^4` against :math:`N r^2`.
#
# With the tolerance at 1e-10 the TT error is set by the solver, not by
# the discretisation. The wave operator has condition number of order
# :math:`N^{3.6}`, so a relative residual of 1e-10 can leave a relative error
# one or two orders larger.
ef, et = field_errors(full, case), field_errors(tt, case)
print(f"E_z error  full {ef['Ez']:.2e}   TT {et['Ez']:.2e}")
