"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the PASS/FAIL lines are
repeated in the "acceptance criteria" section of the terminal summary.
Running this file directly does the same.
"""
import os
import subprocess
import sys
import time
import tracemalloc

import numpy as np
import pytest
from numpy.polynomial import chebyshev as C

from stmaxwell.chebyshev import cg_grid, cgl_grid, diff_matrix, interp_matrix, second_diff
from stmaxwell.errors import MemoryCapError
from stmaxwell.kron import CAP_ENV, to_dense
from stmaxwell.maxwell import (
    E_COMPONENTS,
    Mode,
    assemble_wave_system,
    build_staggered_spaces,
    solve_dense,
    solve_full,
    solve_maxwell,
)
from stmaxwell.maxwell.wave import wave_operator
from stmaxwell.tt import (
    AmenConfig,
    CrossConfig,
    TTMatrix,
    amen_solve,
    apply_tt,
    grid_oracle,
    maxvol,
    tt_cross,
    tt_from_full,
    tt_random,
    tt_round,
)
from stmaxwell.verify import (
    condition_number,
    divergence_residuals,
    field_errors,
    fit_loglog_slope,
    get_case,
    min_real_eig_time,
)

NS_DECAY = (8, 12, 16, 20)


def rel(a, b):
    return float(np.linalg.norm(np.ravel(a - b)) / max(np.linalg.norm(np.ravel(b)), 1e-300))


def err_e(errs):
    return float(np.sqrt(sum(errs[c] ** 2 for c in E_COMPONENTS)))


def err_b(errs):
    return float(np.sqrt(sum(errs[c] ** 2 for c in ("Bx", "By", "Bz"))))


@pytest.fixture(autouse=True)
def default_cap(monkeypatch):
    monkeypatch.delenv(CAP_ENV, raising=False)


# 1 -----------------------------------------------------------------------


def test_c1_kernel_exactness(report):
    worst = 0.0
    for N in (4, 8, 16, 32):
        for iv in ((-1.0, 1.0), (0.0, 1.0)):
            grids = (cgl_grid(N + 1, iv), cg_grid(N, iv))
            for g in grids:
                D = diff_matrix(g).entries
                D2 = second_diff(diff_matrix(g))
                xi = (2 * g.nodes - iv[0] - iv[1]) / (iv[1] - iv[0])
                s = 2 / (iv[1] - iv[0])
                for k in range(g.n):  # every T_k of admissible degree
                    e = np.zeros(k + 1)
                    e[k] = 1.0
                    f = C.chebval(xi, e)
                    for mat, order in ((D, 1), (D2, 2)):
                        ref = C.chebval(xi, C.chebder(e, order)) * s**order
                        scale = max(np.linalg.norm(ref), np.linalg.norm(f) * s**order)
                        worst = max(worst, np.linalg.norm(mat @ f - ref) / scale)
            for src, tgt in (grids, grids[::-1]):
                M = interp_matrix(src, tgt).entries
                xs = (2 * src.nodes - iv[0] - iv[1]) / (iv[1] - iv[0])
                xt = (2 * tgt.nodes - iv[0] - iv[1]) / (iv[1] - iv[0])
                for k in range(src.n):
                    e = np.zeros(k + 1)
                    e[k] = 1.0
                    f, ref = C.chebval(xs, e), C.chebval(xt, e)
                    # T_N vanishes on the N CG nodes, so scale by the data as well
                    scale = max(np.linalg.norm(ref), np.linalg.norm(f))
                    worst = max(worst, np.linalg.norm(M @ f - ref) / scale)
    ok = worst <= 1e-10
    report("C1 kernel exactness", ok, f"max relative error {worst:.2e} over N in 4,8,16,32 (limit 1e-10)")
    assert ok


# 2 -----------------------------------------------------------------------


def test_c2_full_matches_dense(report):
    case = get_case("ex1")
    worst = 0.0
    for N in (5, 6, 7, 8):
        spaces = build_staggered_spaces(N, case.domain)
        for comp in E_COMPONENTS:
            sys_ = assemble_wave_system(case.wave_problem(comp), spaces)
            a, b = solve_full(sys_).values, solve_dense(sys_).values
            nb = np.linalg.norm(b)
            worst = max(worst, np.linalg.norm(a - b) / nb if nb > 0 else np.linalg.norm(a))
    ok = worst <= 1e-9
    report("C2 oracle equivalence", ok, f"max relative difference {worst:.2e} for N=5..8, Ex/Ey/Ez (limit 1e-9)")
    assert ok


# 3 -----------------------------------------------------------------------


def test_c3_ex1_n22(report):
    case = get_case("ex1")
    tt = solve_maxwell(case.problem(), 22, Mode.TT, tt_tol=1e-11)
    full = solve_maxwell(case.problem(), 22, Mode.FULL)
    et, ef = field_errors(tt, case), field_errors(full, case)
    tte, ttb, fe, fb = err_e(et), err_b(et), err_e(ef), err_b(ef)
    ok_tt = tte <= 1e-8 and ttb <= 1e-8
    # full must be within 10x of TT; floor at 1e-12 where both sit at roundoff
    ratios = [max(f, 1e-12) / max(t, 1e-12) for f, t in ((fe, tte), (fb, ttb))]
    ok_full = all(r <= 10 for r in ratios)
    ok_sym = all(max(r, 1 / r) <= 10 for r in ratios)
    ok = ok_tt and ok_full
    report(
        "C3 case ex1 at N=22",
        ok,
        f"TT err_E={tte:.2e} err_B={ttb:.2e} (limit 1e-8); full err_E={fe:.2e} err_B={fb:.2e}; "
        f"full/TT ratios {ratios[0]:.2f}, {ratios[1]:.2f} (limit 10; symmetric {'ok' if ok_sym else 'exceeded'})",
    )
    assert ok


# 4 -----------------------------------------------------------------------


def decay_ok(errs, plateau):
    """Each step cuts the error 10x, unless the previous value is already at the plateau."""
    for a, b in zip(errs, errs[1:]):
        if a <= plateau:
            if b > 10 * plateau:
                return False
        elif not b <= a / 10:
            return False
    return True


@pytest.mark.parametrize("name", ["ex1", "ex2", "ex3"])
def test_c4_exponential_decay(name, report):
    case = get_case(name)
    errs = []
    for N in NS_DECAY:
        errs.append(err_e(field_errors(solve_maxwell(case.problem(), N, Mode.FULL), case)))
    plateau = 1e-11
    ok = decay_ok(errs, plateau)
    steps = ", ".join(f"{a / b:.1e}" for a, b in zip(errs, errs[1:]))
    report(
        f"C4 exponential decay {name}",
        ok,
        "err_E " + ", ".join(f"{e:.2e}" for e in errs) + f" at N=8,12,16,20; step factors {steps} (>=10 or plateau <= {plateau:g})",
    )
    assert ok


# 5 -----------------------------------------------------------------------


def test_c5_divergence(report):
    case = get_case("ex1")
    de, db = [], []
    for N in NS_DECAY:
        a, b = divergence_residuals(solve_maxwell(case.problem(), N, Mode.FULL), case)
        de.append(a)
        db.append(b)
    plateau = 1e-10  # roundoff level of the discrete curl construction
    mono_e = all(b < a for a, b in zip(de, de[1:]))
    mono_b = all(b < a or max(a, b) <= plateau for a, b in zip(db, db[1:]))
    at16 = de[2] <= 1e-6 and db[2] <= 1e-6
    ok = mono_e and mono_b and at16
    report(
        "C5 divergence constraints",
        ok,
        "div_E-rho " + ", ".join(f"{v:.2e}" for v in de) + "; div_B " + ", ".join(f"{v:.2e}" for v in db)
        + f" at N=8,12,16,20 (monotone, plateau <= {plateau:g} for div_B; <= 1e-6 at N=16)",
    )
    assert ok


# 6 -----------------------------------------------------------------------


def test_c6_condition_scaling(report):
    ns = (4, 6, 8, 10, 12)
    k_lap = [condition_number("a_lap", n) for n in ns]
    k_t = [condition_number("s_t_int", n) for n in ns]
    s_lap, s_t = fit_loglog_slope(ns, k_lap), fit_loglog_slope(ns, k_t)
    e_lap = fit_loglog_slope(ns, [condition_number("a_lap", n, "eig") for n in ns])
    e_t = fit_loglog_slope(ns, [condition_number("s_t_int", n, "eig") for n in ns])
    tested = (4, 6, 8, 10, 12, 16, 22, 32)
    lam = [min_real_eig_time(n) for n in tested]
    ok = 3.0 <= s_lap <= 4.5 and 1.3 <= s_t <= 2.5 and min(lam) > 0
    report(
        "C6 condition-number scaling",
        ok,
        f"2-norm slopes A_Lap {s_lap:.2f} (window 3.0-4.5), <S_t> {s_t:.2f} (window 1.3-2.5); "
        f"eigenvalue-ratio slopes {e_lap:.2f}, {e_t:.2f}; min Re lambda(<S_t>) {min(lam):.3f} > 0 for N up to 32",
    )
    assert ok


# 7 -----------------------------------------------------------------------


def test_c7_tt_core(report):
    rng = np.random.default_rng(2024)
    dims = (8, 7, 8, 6)
    t = rng.standard_normal(dims)
    e_round_trip = rel(tt_from_full(t, 0.0).full(), t)
    x = tt_random(dims, (3, 4, 3), rng)
    y = tt_random(dims, (2, 3, 2), rng)
    s = x + y + x  # redundant ranks collapse under rounding
    e_round = rel(tt_round(s, 1e-13).full(), 2 * x.full() + y.full())
    a = TTMatrix(tuple(rng.standard_normal(sh) for sh in [(1, 8, 8, 2), (2, 7, 7, 2), (2, 8, 8, 2), (2, 6, 6, 1)]))
    e_apply = rel(apply_tt(a, x).full().ravel(), a.full() @ x.full().ravel())
    m = [np.eye(n) * 4 + rng.standard_normal((n, n)) for n in dims]
    sys_a = TTMatrix(tuple(v.reshape(1, n, n, 1) for v, n in zip(m, dims)))
    rhs = tt_random(dims, (2, 2, 2), rng)
    sol = amen_solve(sys_a, rhs, AmenConfig(tol=1e-12))
    ref = np.linalg.solve(sys_a.full(), rhs.full().ravel())
    e_amen = rel(sol.x.full().ravel(), ref)
    dom = 0.0
    for shape in ((8, 3), (50, 8), (200, 16)):
        mm = rng.standard_normal(shape)
        rows = maxvol(mm)
        dom = max(dom, np.abs(mm @ np.linalg.inv(mm[rows])).max())
    g = np.linspace(0.1, 1, 8)
    sep = tt_cross(grid_oracle(lambda t, x, y, z: np.sin(t) * x * y**2 * np.exp(z), [g] * 4), (8,) * 4, CrossConfig(1e-10))
    errs = (e_round_trip, e_round, e_apply, e_amen)
    ok = max(errs) <= 1e-10 and dom <= 1.01 and sep.tt.ranks == [1, 1, 1]
    report(
        "C7 TT core correctness",
        ok,
        f"round-trip {e_round_trip:.1e}, round {e_round:.1e}, apply {e_apply:.1e}, amen {e_amen:.1e} (limit 1e-10); "
        f"maxvol dominance {dom:.4f} (limit 1.01); separable cross ranks {sep.tt.ranks}",
    )
    assert ok


# 8 -----------------------------------------------------------------------


def test_c8_memory(report):
    case = get_case("ex1")
    N = 22
    grid_bytes = (N + 1) * N * (N + 1) * (N + 1) * 8
    dense_bytes = (N * (N - 1) ** 3) ** 2 * 8
    ok_arith = grid_bytes >= 2.1e6 and dense_bytes >= 100e9
    tracemalloc.start()
    try:
        sol = solve_maxwell(case.problem(), N, Mode.TT, tt_tol=1e-11)
        peak = tracemalloc.get_traced_memory()[1]
    finally:
        tracemalloc.stop()
    tt_bytes = sum(sol.component(c).nbytes for c in (*E_COMPONENTS, "Bx", "By", "Bz"))
    t0 = time.perf_counter()
    sol24 = solve_maxwell(case.problem(), 24, Mode.TT, tt_tol=1e-11)
    sec24 = time.perf_counter() - t0
    e24 = err_e(field_errors(sol24, case))
    grids24 = tuple(cgl_grid(25, (0.0, 1.0)) for _ in range(4))
    try:
        to_dense(wave_operator(grids24)[0])
        refused = False
    except MemoryCapError:
        refused = True
    ok = ok_arith and peak <= 50e6 and refused and e24 <= 1e-8
    report(
        "C8 memory and complexity",
        ok,
        f"N=22 TT peak traced memory {peak / 1e6:.1f} MB (limit 50), stored TT fields {tt_bytes / 1e3:.0f} kB; "
        f"full grid {grid_bytes / 1e6:.2f} MB per field, dense A_Lap {dense_bytes / 1e9:.0f} GB; "
        f"N=24 TT solve {sec24:.1f} s err_E={e24:.1e}; dense assembly at N=24 {'refused' if refused else 'NOT refused'}",
    )
    assert ok


# 9 -----------------------------------------------------------------------


def test_c9_determinism(tmp_path, report):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}.csv"
        cmd = [sys.executable, "-m", "stmaxwell", "converge", "--case", "ex3", "--ns", "6,8", "--mode", "tt",
               "--tt-tol", "1e-10", "--seed", "7", "--out", str(out)]
        r = subprocess.run(cmd, capture_output=True, text=True, env={**os.environ})
        assert r.returncode == 0, r.stderr
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    report("C9 determinism", ok, f"two TT convergence runs, {len(outs[0])} bytes each, byte-identical={outs[0] == outs[1]}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
