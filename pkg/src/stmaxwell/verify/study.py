"""Convergence, conditioning and full-vs-TT comparison studies with CSV/JSON output."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import SolverError
from ..maxwell.pipeline import solve_maxwell
from ..maxwell.spaces import B_COMPONENTS, E_COMPONENTS
from ..maxwell.wave import Mode
from ..tt import AmenConfig, CrossConfig
from .conditioning import condition_number, fit_exponential_rate, fit_loglog_slope
from .metrics import divergence_residuals, field_errors, relative_difference

__all__ = [
    "CONVERGENCE_COLUMNS",
    "CONDITION_COLUMNS",
    "COMPARE_COLUMNS",
    "SolveSettings",
    "ErrorReport",
    "ConvergenceStudy",
    "ConditionReport",
    "Comparison",
    "evaluate",
    "run_convergence",
    "run_condition",
    "run_comparison",
]

CONVERGENCE_COLUMNS = ("N", "err_Ex", "err_Ey", "err_Ez", "err_B", "div_E", "div_B", "residual", "ranks", "seconds")
CONDITION_COLUMNS = ("N", "kappa")
COMPARE_COLUMNS = ("N", "diff_Ex", "diff_Ey", "diff_Ez", "diff_Bx", "diff_By", "diff_Bz", "max_diff")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12e}"


def _json_num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _csv(columns: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


@dataclass(frozen=True)
class SolveSettings:
    mode: Mode = Mode.FULL
    tt_tol: float = 1e-11
    max_rank: int = 200
    sweeps: int = 50
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.TT and not self.tt_tol > 0:
            raise ValueError("tt_tol must be positive in TT mode")

    def amen(self) -> AmenConfig:
        return AmenConfig(tol=self.tt_tol, max_sweeps=self.sweeps, max_rank=self.max_rank, seed=self.seed)

    def cross(self) -> CrossConfig:
        return CrossConfig(tol=self.tt_tol, max_rank=self.max_rank, seed=self.seed)

    def solve(self, case, N: int):
        return solve_maxwell(case.problem(), N, self.mode, self.tt_tol, self.amen(), self.cross())


@dataclass(frozen=True)
class ErrorReport:
    N: int
    errors: dict  # per component, weighted L2
    div_e: float
    div_b: float
    residual: float  # largest solver residual over the six solves
    ranks: int | None  # largest TT rank over the six components
    seconds: float | None = None

    def __post_init__(self):
        vals = [*self.errors.values(), self.div_e, self.div_b, self.residual]
        if any(v < 0 for v in vals):
            raise ValueError("error report entries must be non-negative")

    @property
    def err_e(self) -> float:
        return math.sqrt(sum(self.errors[c] ** 2 for c in E_COMPONENTS))

    @property
    def err_b(self) -> float:
        return math.sqrt(sum(self.errors[c] ** 2 for c in B_COMPONENTS))

    def row(self) -> list:
        return [
            _fmt(self.N),
            *(_fmt(self.errors[c]) for c in E_COMPONENTS),
            _fmt(self.err_b),
            _fmt(self.div_e),
            _fmt(self.div_b),
            _fmt(self.residual),
            _fmt(self.ranks),
            "" if self.seconds is None else f"{self.seconds:.3f}",
        ]

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            **{f"err_{c}": _json_num(self.errors[c]) for c in E_COMPONENTS},
            "err_B": _json_num(self.err_b),
            "div_E": _json_num(self.div_e),
            "div_B": _json_num(self.div_b),
            "residual": _json_num(self.residual),
            "ranks": self.ranks,
            "seconds": None if self.seconds is None else round(self.seconds, 3),
            "err_B_components": {c: _json_num(self.errors[c]) for c in B_COMPONENTS},
        }


def evaluate(sol, case, seconds: float | None = None) -> ErrorReport:
    errs = field_errors(sol, case)
    div_e, div_b = divergence_residuals(sol, case)
    res = max(float(r) for r in sol.meta["residuals"].values())
    ranks = sol.ranks()
    top = max((max(r, default=1) for r in ranks.values()), default=None) if ranks else None
    return ErrorReport(sol.N, errs, div_e, div_b, res, top, seconds)


@dataclass(frozen=True)
class ConvergenceStudy:
    case: str
    mode: Mode
    reports: tuple
    failures: dict = field(default_factory=dict)  # N -> message

    def __post_init__(self):
        ns = [r.N for r in self.reports]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("Ns must be strictly increasing")

    @property
    def ns(self) -> list:
        return [r.N for r in self.reports]

    def decay_rate(self, which: str = "E") -> float | None:
        """Slope of log(error) against N; about ``-C`` for errors ``~ exp(-C N)``."""
        vals = [r.err_e if which == "E" else r.err_b for r in self.reports]
        pts = [(n, v) for n, v in zip(self.ns, vals) if v > 0]
        if len(pts) < 2:
            return None
        return fit_exponential_rate(*zip(*pts))

    def to_csv(self) -> str:
        rows = [r.row() for r in self.reports]
        rows += [[str(n)] + [""] * (len(CONVERGENCE_COLUMNS) - 1) for n in sorted(self.failures)]
        rows.sort(key=lambda r: int(r[0]))
        return _csv(CONVERGENCE_COLUMNS, rows)

    def to_json(self) -> str:
        doc = {
            "case": self.case,
            "mode": self.mode.value,
            "columns": list(CONVERGENCE_COLUMNS),
            "rows": [r.as_dict() for r in self.reports],
            "failures": {str(k): v for k, v in sorted(self.failures.items())},
            "decay_rate_E": _json_num(self.decay_rate("E")),
            "decay_rate_B": _json_num(self.decay_rate("B")),
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _check_ns(ns: Sequence[int]) -> list:
    ns = [int(n) for n in ns]
    if not ns:
        raise ValueError("need at least one N")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("Ns must be strictly increasing")
    if ns[0] < 3:
        raise ValueError("N must be >= 3")
    return ns


def run_convergence(case, ns: Sequence[int], settings: SolveSettings = SolveSettings(), timing: bool = False, log=None):
    """Solve and measure at each N; failures are recorded and the study continues."""
    ns = _check_ns(ns)
    reports, failures = [], {}
    for n in ns:
        t0 = time.perf_counter()
        try:
            sol = settings.solve(case, n)
        except (SolverError, MemoryError, np.linalg.LinAlgError) as exc:
            failures[n] = f"{type(exc).__name__}: {exc}"
            if log:
                log(f"N={n}: failed ({failures[n]})")
            continue
        rep = evaluate(sol, case, time.perf_counter() - t0 if timing else None)
        reports.append(rep)
        if log:
            log(f"N={n}: err_E={rep.err_e:.3e} err_B={rep.err_b:.3e}")
    return ConvergenceStudy(case.name, settings.mode, tuple(reports), failures)


@dataclass(frozen=True)
class ConditionReport:
    op: str
    kind: str
    ns: tuple
    kappas: tuple

    def __post_init__(self):
        if any(k < 1.0 - 1e-12 for k in self.kappas):
            raise ValueError("condition numbers must be >= 1")

    @property
    def slope(self) -> float:
        return fit_loglog_slope(self.ns, self.kappas)

    def to_csv(self) -> str:
        rows = [[str(n), _fmt(k)] for n, k in zip(self.ns, self.kappas)]
        rows.append(["slope", _fmt(self.slope)])
        return _csv(CONDITION_COLUMNS, rows)

    def to_json(self) -> str:
        doc = {
            "op": self.op,
            "kind": self.kind,
            "columns": list(CONDITION_COLUMNS),
            "rows": [{"N": n, "kappa": k} for n, k in zip(self.ns, self.kappas)],
            "slope": self.slope,
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def run_condition(op: str, ns: Sequence[int], kind: str = "svd") -> ConditionReport:
    ns = _check_ns(ns)
    return ConditionReport(op, kind, tuple(ns), tuple(condition_number(op, n, kind) for n in ns))


@dataclass(frozen=True)
class Comparison:
    case: str
    tt_tol: float
    rows: tuple  # (N, {component: diff})

    def to_csv(self) -> str:
        names = (*E_COMPONENTS, *B_COMPONENTS)
        out = []
        for n, d in self.rows:
            out.append([str(n), *(_fmt(d[c]) for c in names), _fmt(max(d.values()))])
        return _csv(COMPARE_COLUMNS, out)

    def to_json(self) -> str:
        names = (*E_COMPONENTS, *B_COMPONENTS)
        doc = {
            "case": self.case,
            "tt_tol": self.tt_tol,
            "columns": list(COMPARE_COLUMNS),
            "rows": [
                {"N": n, **{f"diff_{c}": d[c] for c in names}, "max_diff": max(d.values())} for n, d in self.rows
            ],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def run_comparison(case, ns: Sequence[int], settings: SolveSettings) -> Comparison:
    """Full-grid vs TT solutions at each N.

    Differences are weighted norms per component, divided by the largest
    norm among the full-mode components of the same field (E or B).
    """
    ns = _check_ns(ns)
    full_s = SolveSettings(Mode.FULL, settings.tt_tol, settings.max_rank, settings.sweeps, settings.seed)
    tt_s = SolveSettings(Mode.TT, settings.tt_tol, settings.max_rank, settings.sweeps, settings.seed)
    rows = []
    for n in ns:
        a = full_s.solve(case, n)
        b = tt_s.solve(case, n)
        grids = a.spaces.grids
        diff = relative_difference(a.e, b.e, grids, E_COMPONENTS)
        diff.update(relative_difference(a.b, b.b, grids, B_COMPONENTS))
        rows.append((n, diff))
    return Comparison(case.name, settings.tt_tol, tuple(rows))
