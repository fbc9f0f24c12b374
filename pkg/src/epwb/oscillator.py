"""Linear oscillator bases z'' + Phi(t) z = 0 and curves built over them.

A basis is a pair of independent solutions (u, v) with constant Wronskian
W = u v' - u' v.  Because the equation supplies every higher derivative
(z'' = -Phi z), curves defined over a basis expose exact derivatives of any
order by recursion, even though u and v themselves are numeric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expressions import DomainError, TimeFunction
from .ode import IntegrationSettings, ODESystem, Trajectory, integrate


class DegenerateBasisError(ValueError):
    """Solution pair is (numerically) linearly dependent."""


def oscillator_system(phi: TimeFunction) -> ODESystem:
    def rhs(t, y):
        return np.array([y[1], -phi.eval(t) * y[0]])

    return ODESystem(dim=2, rhs=rhs)


@dataclass(frozen=True)
class OscillatorBasis:
    phi: TimeFunction
    u: Trajectory
    v: Trajectory
    wronskian0: float

    @property
    def interval(self) -> tuple[float, float]:
        return (self.u.t0, self.u.t_end)

    def curve(self, component: str) -> "BasisCurve":
        return BasisCurve(self, component)


def basis_with_ics(
    phi: TimeFunction,
    interval: tuple[float, float],
    ic_u: tuple[float, float],
    ic_v: tuple[float, float],
    settings: IntegrationSettings | None = None,
) -> OscillatorBasis:
    w0 = ic_u[0] * ic_v[1] - ic_u[1] * ic_v[0]
    if abs(w0) < 1e-12:
        raise DegenerateBasisError(f"initial conditions give Wronskian {w0!r}")
    sys = oscillator_system(phi)
    u = integrate(sys, ic_u, interval, settings)
    v = integrate(sys, ic_v, interval, settings)
    for tr, name in ((u, "u"), (v, "v")):
        if tr.status != "completed":
            raise RuntimeError(f"basis solution {name} failed: {tr.status} ({tr.message})")
    return OscillatorBasis(phi=phi, u=u, v=v, wronskian0=w0)


def fundamental_pair(
    phi: TimeFunction,
    interval: tuple[float, float],
    settings: IntegrationSettings | None = None,
) -> OscillatorBasis:
    """Basis with u(t0), u'(t0) = (1, 0) and v(t0), v'(t0) = (0, 1), so W = 1."""
    return basis_with_ics(phi, interval, (1.0, 0.0), (0.0, 1.0), settings)


def wronskian(basis: OscillatorBasis, t: float) -> float:
    u = basis.u.sample(t)
    v = basis.v.sample(t)
    return float(u[0] * v[1] - u[1] * v[0])


class BasisCurve:
    """One basis solution as a curve with derivatives of every order.

    Orders 0 and 1 come from the stored trajectory; order k >= 2 applies
    z^(k) = -(d/dt)^(k-2) [Phi z] via the Leibniz rule, which only ever
    needs lower-order values and Phi derivatives.
    """

    def __init__(self, basis: OscillatorBasis, component: str):
        if component not in ("u", "v"):
            raise ValueError("component must be 'u' or 'v'")
        self.basis = basis
        self.label = component
        self._traj = basis.u if component == "u" else basis.v

    def eval(self, t: float, order: int = 0) -> float:
        if order < 0:
            raise ValueError("order must be >= 0")
        if order <= 1:
            return float(self._traj.sample(t)[order])
        m = order - 2
        total = 0.0
        for j in range(m + 1):
            total += math.comb(m, j) * self.basis.phi.eval(t, j) * self.eval(t, m - j)
        return -total


class QuadraticFormCurve:
    """w(t) = A u^2 + 2B uv + C v^2 over a basis; derivatives to any order."""

    def __init__(self, basis: OscillatorBasis, A: float, B: float, C: float):
        self.basis = basis
        self.A, self.B, self.C = float(A), float(B), float(C)
        self._u = basis.curve("u")
        self._v = basis.curve("v")
        self.label = "w"

    def eval(self, t: float, order: int = 0) -> float:
        u, v = self._u, self._v

        def prod(a, b):
            # Leibniz d^order (a*b)
            return sum(
                math.comb(order, j) * a.eval(t, j) * b.eval(t, order - j)
                for j in range(order + 1)
            )

        return self.A * prod(u, u) + 2.0 * self.B * prod(u, v) + self.C * prod(v, v)
