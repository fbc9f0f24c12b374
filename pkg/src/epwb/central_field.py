"""Planar time-dependent oscillator with optional tangential forcing.

The radial coordinate of x'' = -Phi(t) x (2D) obeys r'' + Phi r = L0^2/r^3
with L0 the conserved angular momentum r^2 theta' , which is how the cubic
forcing term arises in the first place.  Adding a tangential acceleration
k(t)/r makes d(r^2 theta')/dt = k, so the angular momentum acquires the
formal integral L(t) = L0 + int k dt and the radial equation keeps its form
with G(t) = L(t)^2.

State for the polar integrator is (r, r', theta, L) rather than
(r, r', theta, theta'): L' = k(t) is exact up to quadrature, so the formal
integral is checked against an independent quadrature of k by the same
integrator, and theta' = L/r^2 has no coordinate singularity of its own.
theta is left unwrapped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expressions import DomainError, TimeFunction
from .ode import IntegrationSettings, ODESystem, Trajectory, integrate
from .pinney import drift


@dataclass(frozen=True)
class CentralFieldConfig:
    """Isotropic spring rate Phi(t), tangential forcing k(t) (may be zero)."""

    phi: TimeFunction
    k: TimeFunction


@dataclass(frozen=True)
class PolarState:
    r: float
    rdot: float
    theta: float
    thetadot: float

    @property
    def angular_momentum(self) -> float:
        return self.r * self.r * self.thetadot


def polar_system(cfg: CentralFieldConfig, settings: IntegrationSettings) -> ODESystem:
    """(r, r', theta, L) with r'' = -Phi r + L^2/r^3, theta' = L/r^2, L' = k."""

    def rhs(t: float, y) -> list[float]:
        r, rdot, _, ell = y
        if r <= 0.0:
            raise DomainError(f"radius reached {r!r}")
        r3 = r * r * r
        return [rdot, -cfg.phi(t) * r + ell * ell / r3, ell / (r * r), cfg.k(t)]

    def guard(t: float, y) -> bool:
        return y[0] < settings.x_min

    return ODESystem(dim=4, rhs=rhs, guard=guard)


def simulate_polar(
    cfg: CentralFieldConfig,
    init: PolarState,
    interval: tuple[float, float],
    settings: IntegrationSettings = IntegrationSettings(),
) -> Trajectory:
    if init.r <= 0.0:
        raise ValueError("initial radius must be positive")
    y0 = [init.r, init.rdot, init.theta, init.angular_momentum]
    return integrate(polar_system(cfg, settings), y0, interval, settings)


def k_integral(
    cfg: CentralFieldConfig,
    interval: tuple[float, float],
    settings: IntegrationSettings = IntegrationSettings(),
) -> Trajectory:
    """Quadrature K(t) = int_{t0}^{t} k ds as a one-component trajectory."""
    sys = ODESystem(dim=1, rhs=lambda t, y: [cfg.k(t)])
    return integrate(sys, [0.0], interval, settings)


def angular_momentum_check(
    traj: Trajectory,
    cfg: CentralFieldConfig,
    n: int = 200,
    settings: IntegrationSettings = IntegrationSettings(),
) -> float:
    """Relative drift of L(t) - int k dt along a polar trajectory."""
    quad = k_integral(cfg, (traj.t0, traj.t_end), settings)
    grid = traj.grid(n)
    values = [traj.sample(t)[3] - quad.sample(t)[0] for t in grid]
    return drift(values)


def radial_ep_residual(
    traj: Trajectory,
    cfg: CentralFieldConfig,
    n: int = 200,
    settings: IntegrationSettings = IntegrationSettings(),
) -> float:
    """max |r'' + Phi r - G/r^3| with G = (L(t0) + int k)^2 from the quadrature.

    r'' comes from the producing right-hand side, which carries the evolved
    L(t); the residual therefore measures how well the formal integral
    reproduces the angular momentum, i.e. the identity itself.
    """
    quad = k_integral(cfg, (traj.t0, traj.t_end), settings)
    ell0 = traj.states[0][3]
    worst = 0.0
    for t in traj.grid(n):
        r = traj.sample(t)[0]
        if r <= settings.x_min:
            raise DomainError(f"radius {r!r} too close to the axis at t={t!r}")
        rddot = traj.derivative(t)[1]
        g = (ell0 + quad.sample(t)[0]) ** 2
        worst = max(worst, abs(rddot + cfg.phi(t) * r - g / r**3))
    return worst


def cartesian_system(cfg: CentralFieldConfig, settings: IntegrationSettings) -> ODESystem:
    """(x, x', y, y') with acceleration -Phi pos + (k/r) e_theta."""

    def rhs(t: float, y) -> list[float]:
        x, xdot, yy, ydot = y
        r2 = x * x + yy * yy
        if r2 <= 0.0:
            raise DomainError("radius reached 0")
        phi = cfg.phi(t)
        kv = cfg.k(t)
        return [xdot, -phi * x - kv * yy / r2, ydot, -phi * yy + kv * x / r2]

    def guard(t: float, y) -> bool:
        return math.hypot(y[0], y[2]) < settings.x_min

    return ODESystem(dim=4, rhs=rhs, guard=guard)


def simulate_cartesian(
    cfg: CentralFieldConfig,
    init: PolarState,
    interval: tuple[float, float],
    settings: IntegrationSettings = IntegrationSettings(),
) -> Trajectory:
    """Integrate the same system in Cartesian coordinates (cross-check)."""
    if init.r <= 0.0:
        raise ValueError("initial radius must be positive")
    c, s = math.cos(init.theta), math.sin(init.theta)
    x = init.r * c
    y = init.r * s
    xdot = init.rdot * c - init.r * init.thetadot * s
    ydot = init.rdot * s + init.r * init.thetadot * c
    return integrate(cartesian_system(cfg, settings), [x, xdot, y, ydot], interval, settings)


def polar_from_cartesian(state) -> PolarState:
    """Convert (x, x', y, y') to a PolarState; theta in (-pi, pi]."""
    x, xdot, y, ydot = state
    r = math.hypot(x, y)
    if r == 0.0:
        raise DomainError("radius 0 has no polar chart")
    return PolarState(
        r=r,
        rdot=(x * xdot + y * ydot) / r,
        theta=math.atan2(y, x),
        thetadot=(x * ydot - y * xdot) / (r * r),
    )


def chart_qualified(
    traj: Trajectory,
    cfg: CentralFieldConfig,
    n: int = 200,
    settings: IntegrationSettings = IntegrationSettings(),
) -> bool:
    """Whether G = (L0 + int k)^2 has G' > 0 along the orbit.

    G' = 2 L k, so a forced run qualifies for a reduction chart exactly when
    the angular momentum and the forcing keep one common sign.
    """
    quad = k_integral(cfg, (traj.t0, traj.t_end), settings)
    ell0 = traj.states[0][3]
    for t in traj.grid(n):
        ell = ell0 + quad.sample(t)[0]
        if 2.0 * ell * cfg.k(t) <= 0.0:
            return False
    return True
