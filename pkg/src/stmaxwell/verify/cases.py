"""Manufactured electromagnetic fields with closed-form derivatives.

Every field is a finite sum of separable terms
``coef * g_t(w_t t) * g_x(w_x x) * g_y(w_y y) * g_z(w_z z)`` with each
``g`` one of sin, cos or 1. Derivatives stay in the same class, so the
charge density ``rho = div E`` and the wave sources
``f_i = d_tt E_i - c^2 lap E_i`` are exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..maxwell.pipeline import MaxwellProblem
from ..maxwell.spaces import B_COMPONENTS, E_COMPONENTS, Domain
from ..maxwell.wave import WaveProblem

__all__ = ["Factor", "TrigField", "ManufacturedCase", "builtin_cases", "get_case", "CASE_NAMES"]

_FUNCS = {"sin": np.sin, "cos": np.cos}


@dataclass(frozen=True)
class Factor:
    kind: str  # "sin", "cos" or "one"
    omega: float = 0.0

    def __post_init__(self):
        if self.kind not in ("sin", "cos", "one"):
            raise ValueError(f"unknown factor kind {self.kind!r}")

    def __call__(self, s):
        if self.kind == "one":
            return np.ones_like(np.asarray(s, dtype=float))
        return _FUNCS[self.kind](self.omega * np.asarray(s, dtype=float))

    def derivative(self) -> tuple:
        """``(scale, Factor)`` with ``d/ds self = scale * Factor``."""
        if self.kind == "sin":
            return self.omega, Factor("cos", self.omega)
        if self.kind == "cos":
            return -self.omega, Factor("sin", self.omega)
        return 0.0, self


ONE = Factor("one")


def sin(w: float) -> Factor:
    return Factor("sin", w)


def cos(w: float) -> Factor:
    return Factor("cos", w)


@dataclass(frozen=True)
class TrigField:
    """Sum of separable trig terms over ``(t, x, y, z)``."""

    terms: tuple = ()  # of (coef, (Factor, Factor, Factor, Factor))

    @classmethod
    def term(cls, coef: float, t=ONE, x=ONE, y=ONE, z=ONE) -> "TrigField":
        return cls(((float(coef), (t, x, y, z)),))

    def __call__(self, t, x, y, z):
        args = (t, x, y, z)
        shape = np.broadcast_shapes(*(np.shape(a) for a in args))
        out = np.zeros(shape)
        for coef, fac in self.terms:
            val = coef
            for f, a in zip(fac, args):
                val = val * f(a)
            out = out + val
        return out

    def __add__(self, other: "TrigField") -> "TrigField":
        return TrigField(self.terms + other.terms)

    def __neg__(self) -> "TrigField":
        return self.scaled(-1.0)

    def __sub__(self, other: "TrigField") -> "TrigField":
        return self + (-other)

    def scaled(self, a: float) -> "TrigField":
        return TrigField(tuple((a * c, f) for c, f in self.terms))

    def diff(self, axis: int, order: int = 1) -> "TrigField":
        out = self
        for _ in range(order):
            terms = []
            for coef, fac in out.terms:
                s, g = fac[axis].derivative()
                if s != 0.0:
                    terms.append((coef * s, fac[:axis] + (g,) + fac[axis + 1 :]))
            out = TrigField(tuple(terms))
        return out

    def laplacian(self) -> "TrigField":
        return self.diff(1, 2) + self.diff(2, 2) + self.diff(3, 2)

    @property
    def rank(self) -> int:
        return len(self.terms)

    def at_time(self, t0: float):
        """Oracle ``(x, y, z)`` of the slice at time `t0`."""
        return lambda x, y, z: self(t0, x, y, z)


ZERO = TrigField()


@dataclass(frozen=True, eq=False)
class ManufacturedCase:
    name: str
    description: str
    domain: Domain
    E: tuple  # TrigField per component
    B: tuple
    nominal_rank: int
    c: float = 1.0
    eps0: float = 1.0

    def field(self, comp: str) -> TrigField:
        if comp in E_COMPONENTS:
            return self.E[E_COMPONENTS.index(comp)]
        return self.B[B_COMPONENTS.index(comp)]

    @property
    def rho(self) -> TrigField:
        return self.E[0].diff(1) + self.E[1].diff(2) + self.E[2].diff(3)

    @property
    def div_b(self) -> TrigField:
        return self.B[0].diff(1) + self.B[1].diff(2) + self.B[2].diff(3)

    def source(self, comp: str) -> TrigField:
        e = self.field(comp)
        return e.diff(0, 2) - e.laplacian().scaled(self.c**2)

    def curl_e(self) -> tuple:
        ex, ey, ez = self.E
        return (ez.diff(2) - ey.diff(3), ex.diff(3) - ez.diff(1), ey.diff(1) - ex.diff(2))

    def wave_problem(self, comp: str) -> WaveProblem:
        e = self.field(comp)
        t0 = self.domain.t[0]
        return WaveProblem(
            comp,
            source=self.source(comp),
            v_bd=e,
            v0=e.at_time(t0),
            v0_t=e.diff(0).at_time(t0),
            v_bd_t=e.diff(0),
            c=self.c,
            eps0=self.eps0,
        )

    def problem(self) -> MaxwellProblem:
        t0 = self.domain.t[0]
        return MaxwellProblem(
            self.domain,
            {c: self.wave_problem(c) for c in E_COMPONENTS},
            {c: self.field(c).at_time(t0) for c in B_COMPONENTS},
            self.c,
            self.eps0,
        )


def _sum(fields: Sequence[TrigField]) -> TrigField:
    out = ZERO
    for f in fields:
        out = out + f
    return out


def _ex1() -> ManufacturedCase:
    p, q = np.pi, 2 * np.pi
    T = TrigField.term
    E = (ZERO, T(1, t=sin(q), x=sin(q), y=sin(q)), T(1, t=cos(p), x=sin(p), y=sin(p)))
    B = (
        T(-1, t=sin(p), x=sin(p), y=cos(p)),
        T(1, t=sin(p), x=cos(p), y=sin(p)),
        T(1, t=cos(q), x=cos(q), y=sin(q)),
    )
    return ManufacturedCase("ex1", "rank-1 field independent of z", Domain(), E, B, 1)


def _ex2() -> ManufacturedCase:
    p, q = np.pi, 2 * np.pi
    T = TrigField.term
    E = (
        ZERO,
        T(1, t=sin(q), x=sin(q), y=sin(q), z=sin(q)),
        T(1, t=cos(p), x=sin(p), y=sin(p), z=sin(p)),
    )
    B = (
        T(-1, t=sin(p), x=sin(p), y=cos(p), z=sin(p)) + T(-1, t=cos(q), x=sin(q), y=sin(q), z=cos(q)),
        T(1, t=sin(p), x=cos(p), y=sin(p), z=sin(p)),
        T(1, t=cos(q), x=cos(q), y=sin(q), z=sin(q)),
    )
    dom = Domain(t=(0, 1), x=(-1, 1), y=(-1, 1), z=(-1, 1))
    return ManufacturedCase("ex2", "rank-1 field in all three space variables", dom, E, B, 1)


def _ex3() -> ManufacturedCase:
    T = TrigField.term
    ks = [k * np.pi for k in (1, 2, 3)]
    E = (ZERO, ZERO, _sum([T(1, t=cos(w), x=sin(w), y=sin(w)) for w in ks]))
    B = (
        _sum([T(-1, t=sin(w), x=sin(w), y=cos(w)) for w in ks]),
        _sum([T(1, t=sin(w), x=cos(w), y=sin(w)) for w in ks]),
        ZERO,
    )
    return ManufacturedCase("ex3", "rank-3 sum of three frequencies", Domain(), E, B, 3)


CASE_NAMES = ("ex1", "ex2", "ex3")
_BUILDERS = {"ex1": _ex1, "ex2": _ex2, "ex3": _ex3}


def builtin_cases() -> tuple:
    return tuple(_BUILDERS[n]() for n in CASE_NAMES)


def get_case(name: str) -> ManufacturedCase:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown case {name!r}; choose from {', '.join(CASE_NAMES)}") from None
