"""The maximal-symmetry third-order equation w''' + 2a(t) w' + a'(t) w = 0.

Its solution space is spanned by products of solutions of the half-coefficient
oscillator z'' + (a/2) z = 0 (the full-coefficient base equation fails by a
factor-2 residual; see the audit module).  It carries the first integral

    I = w w'' - w'^2 / 2 + a w^2,

constant on solutions, and the substitution w = rho^2 sends solutions with
I = 2 h^2 to solutions of rho'' + (a/2) rho = h^2 / rho^3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expressions import DomainError, TimeFunction
from .ode import IntegrationSettings, ODESystem, Trajectory, as_curve, integrate
from .oscillator import OscillatorBasis, QuadraticFormCurve
from .pinney import SqrtCurve


@dataclass(frozen=True)
class ThirdOrderConfig:
    a: TimeFunction

    def base_phi(self) -> TimeFunction:
        """Coefficient of the oscillator whose solution products span w."""
        return self.a.scaled(0.5)


def third_order_system(cfg: ThirdOrderConfig) -> ODESystem:
    def rhs(t, y):
        a = cfg.a.eval(t)
        adot = cfg.a.eval(t, 1)
        return np.array([y[1], y[2], -2.0 * a * y[1] - adot * y[0]])

    return ODESystem(dim=3, rhs=rhs)


def integrate_third_order(
    cfg: ThirdOrderConfig,
    y0,
    interval,
    settings: IntegrationSettings | None = None,
) -> Trajectory:
    return integrate(third_order_system(cfg), y0, interval, settings)


def first_integral(cfg: ThirdOrderConfig, w, t: float) -> float:
    """I = w w'' - w'^2/2 + a w^2 evaluated on a curve or trajectory."""
    curve = w.curve((0, 1, 2)) if isinstance(w, Trajectory) else as_curve(w)
    w0 = curve.eval(t, 0)
    w1 = curve.eval(t, 1)
    w2 = curve.eval(t, 2)
    return w0 * w2 - 0.5 * w1 * w1 + cfg.a.eval(t) * w0 * w0


def product_solution(basis: OscillatorBasis, A: float, B: float, C: float) -> QuadraticFormCurve:
    """w = A u^2 + 2B uv + C v^2 over a basis of the half-coefficient oscillator."""
    return QuadraticFormCurve(basis, A, B, C)


def third_order_residual(cfg: ThirdOrderConfig, w, grid) -> float:
    """max |w''' + 2a w' + a' w| over the grid."""
    curve = w.curve((0, 1, 2)) if isinstance(w, Trajectory) else as_curve(w)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty residual grid")
    worst = 0.0
    for t in grid:
        r = (
            curve.eval(t, 3)
            + 2.0 * cfg.a.eval(t) * curve.eval(t, 1)
            + cfg.a.eval(t, 1) * curve.eval(t, 0)
        )
        worst = max(worst, abs(r))
    return worst


def rho_substitution(cfg: ThirdOrderConfig, w, grid) -> tuple[SqrtCurve, float]:
    """rho = sqrt(w) and the residual of rho'' + (a/2) rho = h^2/rho^3.

    h^2 is read off as first_integral/2 at the left end of the grid.  Raises
    if w is not positive on the grid.
    """
    curve = w.curve((0, 1, 2)) if isinstance(w, Trajectory) else as_curve(w)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty grid")
    h2 = 0.5 * first_integral(cfg, w, float(grid[0]))
    rho = SqrtCurve(curve, label="rho")
    worst = 0.0
    for t in grid:
        r0 = rho.eval(t, 0)  # raises DomainError when w <= 0
        if r0 < 1e-6:
            # rho'' carries a 1/(2 rho) factor, so a vanishing w makes the
            # residual pure rounding noise; same floor as the EP guard
            raise DomainError(f"w vanishes at t={t!r} (rho={r0!r})")
        r = rho.eval(t, 2) + 0.5 * cfg.a.eval(t) * r0 - h2 / r0**3
        worst = max(worst, abs(r))
    return rho, worst
