"""Batch front end: run scenario files, emit traces, reports, and the ledger.

Usage:
    epwb run <scenario.json>
    epwb audit-all [--out ledger.json]
    epwb print-grammar

A scenario is one JSON object with a "kind" selecting the pipeline:

    simulate          integrate x'' + phi x = g/x^3, dump t,x,xdot
    verify-invariant  drift audit for ermakov / lewis / lorentz
    verify-symmetry   linearized-condition residual for tau, xi
    reduce            compatible family -> canonical chart -> residuals
    eliezer-grey      polar run, angular momentum + radial identity
    audit-all         write the corrections ledger

Expression-valued fields use the grammar shown by print-grammar.  Output
paths are resolved relative to the scenario file.  Exit codes: 0 all checks
passed, 2 a residual exceeded its threshold (or a run failed mid-flight),
1 configuration or parse errors.  The default residual threshold is 1e-6;
the EPWB_TOL environment variable overrides the default, an explicit
"threshold" key in the scenario overrides both.  Outputs carry no
timestamps and use fixed float formatting, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .audit import audit_all, ledger_json
from .central_field import (
    CentralFieldConfig,
    PolarState,
    angular_momentum_check,
    chart_qualified,
    radial_ep_residual,
    simulate_polar,
)
from .expressions import (
    GRAMMAR_HELP,
    Const,
    DomainError,
    ExprSyntaxError,
    TimeFunction,
    parse_expression,
    time_function,
)
from .ode import COMPLETED, IntegrationSettings, integrate, write_csv
from .oscillator import DegenerateBasisError, oscillator_system
from .pinney import (
    EPConfig,
    LewisState,
    ep_system,
    ermakov_invariant,
    invariant_audit,
    lewis_invariant,
    lorentz_adiabatic,
)
from .reduction import abel_residual, autonomous_residual, canonical_chart, transform_trajectory
from .symmetry import (
    PointSymmetry,
    SecondOrderODE,
    compatible_family,
    default_samples,
    surviving_symmetry,
    symmetry_residual,
)

_DEFAULT_TOL = 1e-6


class ScenarioError(ValueError):
    """Configuration problem: missing key, bad type, unusable value."""


def _tol_default() -> float:
    raw = os.environ.get("EPWB_TOL")
    if raw is None:
        return _DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise ScenarioError(f"EPWB_TOL is not a decimal float: {raw!r}")
    if not math.isfinite(value) or value <= 0.0:
        raise ScenarioError(f"EPWB_TOL must be a positive finite float, got {raw!r}")
    return value


def _require(sc: dict, key: str):
    if key not in sc:
        raise ScenarioError(f"scenario is missing required key {key!r}")
    return sc[key]


def _number(sc: dict, key: str, default=None) -> float:
    value = sc.get(key, default)
    if value is None:
        raise ScenarioError(f"scenario is missing required key {key!r}")
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ScenarioError(f"{key!r} must be a number, got {value!r}")
    return float(value)


def _interval(sc: dict) -> tuple[float, float]:
    raw = _require(sc, "interval")
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ScenarioError(f"'interval' must be [t0, t1], got {raw!r}")
    t0, t1 = float(raw[0]), float(raw[1])
    if not (t0 < t1):
        raise ScenarioError(f"'interval' must satisfy t0 < t1, got {raw!r}")
    return t0, t1


def _settings(sc: dict) -> IntegrationSettings:
    raw = sc.get("settings", {})
    if not isinstance(raw, dict):
        raise ScenarioError(f"'settings' must be an object, got {raw!r}")
    allowed = {"rtol", "atol", "max_steps", "x_min"}
    unknown = set(raw) - allowed
    if unknown:
        raise ScenarioError(f"unknown settings keys {sorted(unknown)!r}")
    try:
        return IntegrationSettings(**raw)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad settings: {exc}")


def _tf(sc: dict, key: str, default: str | None = None) -> TimeFunction:
    text = sc.get(key, default)
    if text is None:
        raise ScenarioError(f"scenario is missing required key {key!r}")
    if not isinstance(text, str):
        raise ScenarioError(f"{key!r} must be an expression string, got {text!r}")
    return time_function(text)


def _const_tf(value: float) -> TimeFunction:
    return TimeFunction(Const(float(value)))


def _pair(sc: dict, key: str, default=None) -> tuple[float, float]:
    raw = sc.get(key, default)
    if raw is None:
        raise ScenarioError(f"scenario is missing required key {key!r}")
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ScenarioError(f"{key!r} must be a pair of numbers, got {raw!r}")
    return float(raw[0]), float(raw[1])


def _outputs(sc: dict) -> dict:
    raw = sc.get("outputs", {})
    if not isinstance(raw, dict):
        raise ScenarioError(f"'outputs' must be an object, got {raw!r}")
    return raw


def _out_path(base_dir: str, rel: str) -> str:
    if not isinstance(rel, str) or not rel:
        raise ScenarioError(f"output path must be a nonempty string, got {rel!r}")
    return rel if os.path.isabs(rel) else os.path.join(base_dir, rel)


def _write_report(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_dat(path: str, names, rows) -> None:
    """gnuplot-friendly whitespace table with a comment header."""
    with open(path, "w") as fh:
        fh.write("# " + " ".join(names) + "\n")
        for row in rows:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def _emit(outputs: dict, base_dir: str, report: dict, csv_writer=None, dat_writer=None) -> None:
    if "csv" in outputs:
        if csv_writer is None:
            raise ScenarioError("this kind produces no csv output")
        csv_writer(_out_path(base_dir, outputs["csv"]))
    if "dat" in outputs:
        if dat_writer is None:
            raise ScenarioError("this kind produces no dat output")
        dat_writer(_out_path(base_dir, outputs["dat"]))
    if "report" in outputs:
        _write_report(_out_path(base_dir, outputs["report"]), report)


def _verdict(report: dict, outputs: dict, base_dir: str, **writers) -> int:
    _emit(outputs, base_dir, report, **writers)
    if not report.get("pass", False):
        sys.stderr.write(f"epwb: check failed: {json.dumps(report, sort_keys=True)}\n")
        return 2
    return 0


def _run_simulate(sc: dict, base_dir: str) -> int:
    cfg = EPConfig(phi=_tf(sc, "phi"), g=_tf(sc, "g"))
    settings = _settings(sc)
    interval = _interval(sc)
    initial = _pair(sc, "initial")
    traj = integrate(ep_system(cfg, settings), initial, interval, settings)
    report = {
        "kind": "simulate",
        "status": traj.status,
        "message": traj.message,
        "interval": [traj.t0, traj.t_end],
        "steps": len(traj.times) - 1,
        "final_state": [float(v) for v in traj.states[-1]],
        "pass": traj.status == COMPLETED,
    }
    return _verdict(
        report,
        _outputs(sc),
        base_dir,
        csv_writer=lambda p: write_csv(traj, p, ("x", "xdot")),
        dat_writer=lambda p: _write_dat(
            p, ("t", "x", "xdot"), [(t, *y) for t, y in zip(traj.times, traj.states)]
        ),
    )


def _invariant_series(sc: dict, interval, settings):
    name = _require(sc, "invariant")
    phi = _tf(sc, "phi")
    n = int(sc.get("samples", 200))
    if n < 2:
        raise ScenarioError("'samples' must be at least 2")

    if name == "ermakov":
        h2 = _number(sc, "h2", 1.0)
        x0 = _pair(sc, "initial")
        y0 = _pair(sc, "aux_initial", (1.0, 0.0))
        cfg = EPConfig(phi=phi, g=_const_tf(h2))
        xt = integrate(ep_system(cfg, settings), x0, interval, settings)
        yt = integrate(oscillator_system(phi), y0, interval, settings)
        for tr in (xt, yt):
            if tr.status != COMPLETED:
                raise DomainError(f"integration stopped: {tr.status} ({tr.message})")
        grid = xt.grid(n)
        values = [ermakov_invariant(xt, yt, h2, t) for t in grid]
        return name, grid, values

    if name == "lewis":
        q0 = _pair(sc, "initial")
        rho0 = _pair(sc, "aux_initial", (1.0, 0.0))
        qt = integrate(oscillator_system(phi), q0, interval, settings)
        rt = integrate(ep_system(EPConfig(phi=phi, g=_const_tf(1.0)), settings), rho0, interval, settings)
        for tr in (qt, rt):
            if tr.status != COMPLETED:
                raise DomainError(f"integration stopped: {tr.status} ({tr.message})")
        grid = qt.grid(n)
        values = []
        for t in grid:
            q, p = qt.sample(t)
            rho, rho_dot = rt.sample(t)
            values.append(lewis_invariant(LewisState(q=q, p=p, rho=rho, rho_dot=rho_dot)))
        return name, grid, values

    if name == "lorentz":
        q0 = _pair(sc, "initial")
        qt = integrate(oscillator_system(phi), q0, interval, settings)
        if qt.status != COMPLETED:
            raise DomainError(f"integration stopped: {qt.status} ({qt.message})")
        grid = qt.grid(n)
        values = []
        for t in grid:
            w2 = phi(t)
            if w2 <= 0.0:
                raise DomainError(f"frequency squared {w2!r} not positive at t={t!r}")
            q, p = qt.sample(t)
            values.append(lorentz_adiabatic(math.sqrt(w2), q, p))
        return name, grid, values

    raise ScenarioError(f"unknown invariant {name!r} (want ermakov, lewis or lorentz)")


def _run_verify_invariant(sc: dict, base_dir: str) -> int:
    interval = _interval(sc)
    settings = _settings(sc)
    threshold = _number(sc, "threshold", _tol_default())
    name, grid, values = _invariant_series(sc, interval, settings)
    report = invariant_audit(name, interval, grid, values)
    report["kind"] = "verify-invariant"
    report["threshold"] = threshold
    report["pass"] = bool(report["drift"] <= threshold)
    return _verdict(report, _outputs(sc), base_dir)


def _run_verify_symmetry(sc: dict, base_dir: str) -> int:
    interval = _interval(sc)
    threshold = _number(sc, "threshold", _tol_default())
    if "tau" in sc or "xi" in sc:
        tau = parse_expression(str(_require(sc, "tau")), ("t", "x"))
        xi = parse_expression(str(_require(sc, "xi")), ("t", "x"))
        sym = PointSymmetry(tau, xi, "scenario")
        ode = SecondOrderODE.from_ep(_tf(sc, "phi"), _tf(sc, "g"))
    else:
        fam = compatible_family(_tf(sc, "g"), _number(sc, "c0"), _number(sc, "m"), interval)
        sym = surviving_symmetry(fam)
        phi = _tf(sc, "phi") if "phi" in sc else fam.phi
        ode = SecondOrderODE.from_ep(phi, fam.g)
    samples = default_samples(
        interval,
        x_range=_pair(sc, "x_range", (0.5, 2.0)),
        v_range=_pair(sc, "v_range", (-1.0, 1.0)),
        n=int(sc.get("n", 5)),
    )
    res = symmetry_residual(sym, ode, samples)
    report = {
        "kind": "verify-symmetry",
        "residual": float(res),
        "samples": len(samples),
        "threshold": threshold,
        "pass": bool(res <= threshold),
    }
    return _verdict(report, _outputs(sc), base_dir)


def _run_reduce(sc: dict, base_dir: str) -> int:
    interval = _interval(sc)
    settings = _settings(sc)
    threshold = _number(sc, "threshold", _tol_default())
    abel_threshold = _number(sc, "abel_threshold", 1e-5)
    fam = compatible_family(_tf(sc, "g"), _number(sc, "c0"), _number(sc, "m"), interval)
    chart = canonical_chart(fam, sigma=_number(sc, "sigma", 0.25))
    traj = integrate(
        ep_system(EPConfig(phi=fam.phi, g=fam.g), settings), _pair(sc, "initial"), interval, settings
    )
    if traj.status != COMPLETED:
        sys.stderr.write(f"epwb: integration stopped: {traj.status} ({traj.message})\n")
        return 2
    orbit = transform_trajectory(chart, traj, n=int(sc.get("n", 400)))
    res = autonomous_residual(orbit, fam)
    abel = abel_residual(orbit, fam)
    report = {
        "kind": "reduce",
        "omega": fam.omega,
        "sigma": chart.sigma,
        "autonomous_residual": float(res),
        "abel_residual": abel.residual,
        "abel_samples_used": abel.samples_used,
        "abel_samples_skipped": abel.samples_skipped,
        "threshold": threshold,
        "abel_threshold": abel_threshold,
        "pass": bool(res <= threshold and abel.residual <= abel_threshold),
    }
    return _verdict(
        report,
        _outputs(sc),
        base_dir,
        csv_writer=orbit.write_csv,
        dat_writer=lambda p: _write_dat(
            p, ("T", "X", "V"), list(zip(orbit.T, orbit.X, orbit.V))
        ),
    )


def _run_eliezer_grey(sc: dict, base_dir: str) -> int:
    interval = _interval(sc)
    settings = _settings(sc)
    threshold = _number(sc, "threshold", _tol_default())
    cfg = CentralFieldConfig(phi=_tf(sc, "phi"), k=_tf(sc, "k", "0"))
    raw = _require(sc, "initial")
    if isinstance(raw, dict):
        init = PolarState(
            r=_number(raw, "r"),
            rdot=_number(raw, "rdot", 0.0),
            theta=_number(raw, "theta", 0.0),
            thetadot=_number(raw, "thetadot"),
        )
    elif isinstance(raw, (list, tuple)) and len(raw) == 4:
        init = PolarState(*map(float, raw))
    else:
        raise ScenarioError(f"'initial' must be [r, rdot, theta, thetadot] or an object, got {raw!r}")
    if init.r <= 0.0:
        raise ScenarioError(f"initial radius must be positive, got {init.r!r}")
    traj = simulate_polar(cfg, init, interval, settings)
    if traj.status != COMPLETED:
        sys.stderr.write(f"epwb: integration stopped: {traj.status} ({traj.message})\n")
        return 2
    am_drift = angular_momentum_check(traj, cfg, settings=settings)
    radial = radial_ep_residual(traj, cfg, settings=settings)
    report = {
        "kind": "eliezer-grey",
        "angular_momentum_drift": float(am_drift),
        "radial_residual": float(radial),
        "chart_qualified": chart_qualified(traj, cfg, settings=settings),
        "threshold": threshold,
        "pass": bool(am_drift <= threshold and radial <= threshold),
    }
    return _verdict(
        report,
        _outputs(sc),
        base_dir,
        csv_writer=lambda p: write_csv(traj, p, ("r", "rdot", "theta", "L")),
        dat_writer=lambda p: _write_dat(
            p, ("t", "r", "rdot", "theta", "L"), [(t, *y) for t, y in zip(traj.times, traj.states)]
        ),
    )


def _run_audit_all(sc: dict, base_dir: str) -> int:
    report = audit_all()
    text = ledger_json(report)
    outputs = _outputs(sc)
    target = outputs.get("ledger", outputs.get("report"))
    if target is not None:
        with open(_out_path(base_dir, target), "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["all_resolved"] else 2


_KINDS = {
    "simulate": _run_simulate,
    "verify-invariant": _run_verify_invariant,
    "verify-symmetry": _run_verify_symmetry,
    "reduce": _run_reduce,
    "eliezer-grey": _run_eliezer_grey,
    "audit-all": _run_audit_all,
}


def _dispatch(sc: dict, base_dir: str) -> int:
    if not isinstance(sc, dict):
        raise ScenarioError("scenario file must contain one JSON object")
    kind = _require(sc, "kind")
    handler = _KINDS.get(kind)
    if handler is None:
        raise ScenarioError(f"unknown kind {kind!r} (want one of {sorted(_KINDS)})")
    return handler(sc, base_dir)


def _cmd_run(path: str) -> int:
    try:
        with open(path) as fh:
            scenario = json.load(fh)
    except OSError as exc:
        sys.stderr.write(f"epwb: cannot read scenario: {exc}\n")
        return 1
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"epwb: scenario is not valid JSON: {exc}\n")
        return 1
    base_dir = os.path.dirname(os.path.abspath(path))
    try:
        return _dispatch(scenario, base_dir)
    except ExprSyntaxError as exc:
        sys.stderr.write(f"epwb: expression error: {exc}\n")
        return 1
    except (ScenarioError, DegenerateBasisError, ValueError) as exc:
        if isinstance(exc, DomainError):
            sys.stderr.write(f"epwb: run failed: {exc}\n")
            return 2
        sys.stderr.write(f"epwb: configuration error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"epwb: cannot write output: {exc}\n")
        return 1


def _cmd_audit(out: str | None) -> int:
    report = audit_all()
    text = ledger_json(report)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)
    return 0 if report["all_resolved"] else 2


class _ArgumentParser(argparse.ArgumentParser):
    # exit 1 on usage errors; 2 is reserved for failed verifications
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="epwb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="execute a scenario file")
    run_p.add_argument("scenario", help="path to a scenario JSON file")
    audit_p = sub.add_parser("audit-all", help="emit the corrections ledger")
    audit_p.add_argument("--out", default=None, help="write the ledger here instead of stdout")
    sub.add_parser("print-grammar", help="show the expression grammar")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "print-grammar":
        sys.stdout.write(GRAMMAR_HELP)
        return 0
    if args.command == "audit-all":
        try:
            return _cmd_audit(args.out)
        except OSError as exc:
            sys.stderr.write(f"epwb: cannot write ledger: {exc}\n")
            return 1
    return _cmd_run(args.scenario)


if __name__ == "__main__":
    raise SystemExit(main())
