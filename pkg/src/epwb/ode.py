"""Adaptive Dormand-Prince 5(4) integration with dense output.

The stepper is the classic embedded pair: fifth-order propagation, fourth-
order error estimate, FSAL, PI step-size control, and a quartic per-step
interpolant (the standard dense-output coefficient matrix for this tableau).
Trajectories keep the interpolant for every accepted step, remember the
right-hand side that produced them, and carry a termination status:

    "completed"     reached the end of the requested interval
    "guard-stop"    a guard predicate fired; the offending step is discarded,
                    so no retained or interpolated sample violates the guard
    "step-failure"  step size underflow or step budget exhausted; the
                    trajectory holds everything up to the last good node

Residual checking follows one rule everywhere in the workbench: the
trajectory's own slope at a time t is the producing right-hand side
evaluated at the interpolated state (never a re-differentiated
interpolant), and the residual of a candidate system is the largest
mismatch between that slope and the candidate's right-hand side over a
grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .expressions import DomainError

COMPLETED = "completed"
GUARD_STOP = "guard-stop"
STEP_FAILURE = "step-failure"

# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    np.array([], dtype=float),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# Dense output: y(t0 + th*h) = y0 + h * (K^T P) @ [th, th^2, th^3, th^4].
_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_BETA = 0.04  # PI stabilization
_EXPO = 0.2 - 0.75 * _BETA
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0

_RHS_ERRORS = (DomainError, ZeroDivisionError, OverflowError)


@dataclass(frozen=True)
class ODESystem:
    """First-order system y' = rhs(t, y) with an optional abort guard."""

    dim: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    guard: Optional[Callable[[float, np.ndarray], bool]] = None


@dataclass(frozen=True)
class IntegrationSettings:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 1_000_000
    x_min: float = 1e-6  # guard threshold used by positivity-guarded systems

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


class Trajectory:
    """Accepted nodes plus per-step dense output of a single integration."""

    def __init__(self, times, states, dense, steps, rhs, status, message=""):
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self._dense = dense  # list of (dim, 4) arrays, one per step
        self._steps = np.asarray(steps, dtype=float)
        self.rhs = rhs
        self.status = status
        self.message = message

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def sample(self, t: float) -> np.ndarray:
        """State at time t. Node times reproduce the stored state exactly."""
        times = self.times
        if not (times[0] <= t <= times[-1]):
            raise DomainError(
                f"t={t!r} outside trajectory range [{times[0]!r}, {times[-1]!r}]"
            )
        idx = int(np.searchsorted(times, t, side="right")) - 1
        if idx >= len(self._dense):
            idx = len(self._dense) - 1
        if times[idx] == t:
            return self.states[idx].copy()
        if idx + 1 < len(times) and times[idx + 1] == t:
            return self.states[idx + 1].copy()
        h = self._steps[idx]
        th = (t - times[idx]) / h
        p = np.array([th, th * th, th**3, th**4])
        return self.states[idx] + h * (self._dense[idx] @ p)

    def sample_many(self, ts: Sequence[float]) -> np.ndarray:
        return np.array([self.sample(t) for t in ts])

    def derivative(self, t: float) -> np.ndarray:
        """Slope of the trajectory: producing rhs at the interpolated state."""
        return np.asarray(self.rhs(t, self.sample(t)), dtype=float)

    def grid(self, n: int = 200) -> np.ndarray:
        return np.linspace(self.t0, self.t_end, n)

    def curve(self, chain: tuple[int, ...] = (0, 1)) -> "SolutionCurve":
        return SolutionCurve(self, chain)


class SolutionCurve:
    """Derivative-chain view of trajectory components.

    ``chain`` lists state indices holding successive derivatives of one
    scalar quantity; the next derivative past the chain comes from the
    producing right-hand side. For a second-order system in state (x, x')
    the default chain (0, 1) yields orders 0..2.
    """

    def __init__(self, traj: Trajectory, chain: tuple[int, ...] = (0, 1), label: str = "x"):
        self.traj = traj
        self.chain = chain
        self.label = label

    def eval(self, t: float, order: int = 0) -> float:
        if order < 0:
            raise ValueError("order must be >= 0")
        if order < len(self.chain):
            return float(self.traj.sample(t)[self.chain[order]])
        if order == len(self.chain):
            return float(self.traj.derivative(t)[self.chain[-1]])
        raise ValueError(f"derivative order {order} unavailable from this trajectory")


def as_curve(obj):
    """Accept a Trajectory or any object with eval(t, order)."""
    if isinstance(obj, Trajectory):
        return obj.curve()
    if hasattr(obj, "eval"):
        return obj
    raise TypeError(f"cannot view {type(obj).__name__} as a curve")


def _initial_step(rhs, t0, y0, f0, t1, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = _rms(y0 / scale)
    d1 = _rms(f0 / scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, abs(t1 - t0))
    try:
        y1 = y0 + h0 * f0
        f1 = np.asarray(rhs(t0 + h0, y1), dtype=float)
        d2 = _rms((f1 - f0) / scale) / h0
    except _RHS_ERRORS:
        d2 = math.inf
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, abs(t1 - t0))


def _rms(v: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(v))))


def integrate(
    sys: ODESystem,
    y0: Sequence[float],
    interval: tuple[float, float],
    settings: IntegrationSettings | None = None,
) -> Trajectory:
    """Integrate forward over ``interval``; never raises for step failures.

    Guard violations and step-size underflow are reported through the
    trajectory status so callers always get the prefix that was computed.
    Returned states are always finite.
    """
    settings = settings or IntegrationSettings()
    t0, t1 = float(interval[0]), float(interval[1])
    if not (t0 < t1):
        raise ValueError(f"need t0 < t1, got {interval!r}")
    y = np.asarray(y0, dtype=float)
    if y.shape != (sys.dim,):
        raise ValueError(f"initial state has shape {y.shape}, system dim is {sys.dim}")
    if not np.all(np.isfinite(y)):
        raise ValueError("initial state must be finite")

    times = [t0]
    states = [y.copy()]
    dense = []
    steps = []

    def done(status, message=""):
        return Trajectory(times, states, dense, steps, sys.rhs, status, message)

    if sys.guard is not None and sys.guard(t0, y):
        return done(GUARD_STOP, f"guard fired at initial state t={t0!r}")

    t = t0
    try:
        f = np.asarray(sys.rhs(t, y), dtype=float)
    except _RHS_ERRORS as e:
        return done(STEP_FAILURE, f"right-hand side undefined at t={t!r}: {e}")
    if not np.all(np.isfinite(f)):
        return done(STEP_FAILURE, f"non-finite right-hand side at t={t!r}")

    rtol, atol = settings.rtol, settings.atol
    h = _initial_step(sys.rhs, t0, y, f, t1, rtol, atol)
    facold = 1e-4
    rejected = False
    K = np.empty((7, sys.dim))

    for _ in range(settings.max_steps):
        if t >= t1:
            return done(COMPLETED)
        hmin = 1e-14 * max(1.0, abs(t))
        if h < hmin:
            return done(STEP_FAILURE, f"step size underflow at t={t!r}")
        h = min(h, t1 - t)

        K[0] = f
        bad = False
        try:
            for i in range(1, 6):
                K[i] = sys.rhs(t + _C[i] * h, y + h * (_A[i] @ K[:i]))
            y_new = y + h * (_B[:6] @ K[:6])
            K[6] = sys.rhs(t + h, y_new)
        except _RHS_ERRORS:
            bad = True

        if not bad and np.all(np.isfinite(K)) and np.all(np.isfinite(y_new)):
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = _rms(h * (_E @ K) / scale)
        else:
            err_norm = math.inf

        if not (err_norm <= 1.0):
            # reject
            fac11 = err_norm**_EXPO if math.isfinite(err_norm) else 10.0
            h = h / min(1 / _MIN_FACTOR, fac11 / _SAFETY)
            rejected = True
            continue

        # accepted: guard scan over the step before committing it
        Q = K.T @ _P
        if sys.guard is not None:
            fired = sys.guard(t + h, y_new)
            if not fired:
                for th in (0.25, 0.5, 0.75):
                    p = np.array([th, th * th, th**3, th**4])
                    if sys.guard(t + th * h, y + h * (Q @ p)):
                        fired = True
                        break
            if fired:
                return done(GUARD_STOP, f"guard fired within step ending t={t + h!r}")

        times.append(t + h)
        states.append(y_new.copy())
        dense.append(Q)
        steps.append(h)
        t = t + h
        y = y_new
        f = K[6].copy()  # FSAL

        if err_norm == 0.0:
            fac = _MIN_FACTOR  # h / fac = max growth
        else:
            fac11 = err_norm**_EXPO
            fac = fac11 / facold**_BETA
        fac = max(1 / _MAX_FACTOR, min(1 / _MIN_FACTOR, fac / _SAFETY))
        h_new = h / fac
        if rejected:
            h_new = min(h_new, h)
            rejected = False
        facold = max(err_norm, 1e-4)
        h = h_new

    if t >= t1:
        return done(COMPLETED)
    return done(STEP_FAILURE, f"step budget exhausted at t={t!r}")


def residual(sys: ODESystem, tr: Trajectory, grid: Sequence[float]) -> float:
    """Largest |trajectory slope - sys.rhs| over the grid (max over components).

    The universal verdict: a trajectory of system P checked against system Q
    measures max |rhs_P - rhs_Q| along the orbit, which is ~0 for Q = P and
    the honest defect size otherwise.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty residual grid")
    worst = 0.0
    for t in grid:
        y = tr.sample(t)
        d = tr.derivative(t) - np.asarray(sys.rhs(t, y), dtype=float)
        worst = max(worst, float(np.max(np.abs(d))))
    return worst


def write_csv(tr: Trajectory, path, names: Sequence[str] = ("x", "xdot")) -> None:
    """Node-by-node CSV dump: header ``t,<names...>``, 17 significant digits."""
    if len(names) != tr.dim:
        raise ValueError(f"{len(names)} names for state dimension {tr.dim}")
    lines = ["t," + ",".join(names)]
    for t, y in zip(tr.times, tr.states):
        lines.append(",".join(f"{v:.17g}" for v in (t, *y)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
