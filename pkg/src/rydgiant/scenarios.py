"""Scenario catalog, sweep execution and data export.

A scenario selects a model (pair, giant, or pair with continuous
couplings), an initial state, integrator settings and observables, plus an
optional one-parameter sweep.  Sweep points run concurrently on a process
pool (worker count from RYDGIANT_WORKERS or the CPU count) with
deterministic output ordering; one point failing never touches its
siblings, it is just flagged in the manifest.
"""

from __future__ import annotations

import concurrent.futures
import json
import math
import os
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__
from .core import DensityMatrix
from .pair import PairParams, exchange_rates, pair_rhs_fn
from .giant import giant_params_from_pair, giant_rhs_fn, upsilon
from .continuous import continuous_rates, continuous_pair_rhs_fn, upsilon_continuous
from .integrate import IntegratorConfig, integrate
from .observables import GIANT_OBSERVERS, pair_observers


class ConfigError(ValueError):
    """Invalid scenario configuration; carries every violation found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(self.problems))


MODELS = ("pair", "giant", "pair_continuous")
INITIAL_STATES = ("ground", "double_excited", "plus", "minus", "custom")

PAIR_DEFAULT_OBSERVABLES = (
    "gg", "r1g2", "g1r2", "rr", "plus", "minus", "concurrence", "g2",
    "coh_r_plus",
)
GIANT_DEFAULT_OBSERVABLES = ("gg", "rr")

#: numeric fields a sweep may address
SWEEPABLE = (
    "params.gamma", "params.Gamma", "params.Omega_c", "params.Delta_c",
    "params.phi", "params.V6", "params.theta",
)


def parse_number(text):
    """Parse a numeric literal, accepting a 'pi' suffix (e.g. '40.5pi')."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().lower().replace(" ", "")
    factor = 1.0
    if s.endswith("pi"):
        factor = math.pi
        s = s[:-2] or "1"
        if s in ("-", "+"):
            s += "1"
    try:
        return float(s) * factor
    except ValueError:
        raise ValueError(f"cannot parse numeric literal {text!r}") from None


DEFAULT_PARAMS = {
    "gamma": 0.001,
    "Gamma": 1.0,
    "Omega_c": 1.0,
    "Delta_c": 30.0,
    "phi": 40.5 * math.pi,
    "V6": 2.0e4,
    "theta": 0.0,
}


@dataclass(frozen=True)
class ScenarioConfig:
    """One runnable scenario (possibly a sweep over one numeric field)."""

    model: str = "pair"
    params: dict = field(default_factory=dict)
    initial_state: str = "double_excited"
    custom_state: tuple | None = None
    integrator: IntegratorConfig = field(
        default_factory=lambda: IntegratorConfig(t_end=300.0, samples=3000)
    )
    observables: tuple = ()
    sweep_parameter: str | None = None
    sweep_values: tuple = ()
    label: str = "scenario"

    def full_params(self):
        p = dict(DEFAULT_PARAMS)
        p.update(self.params)
        return p

    def validate(self):
        problems = []
        if self.model not in MODELS:
            problems.append(f"unknown model {self.model!r} (choose from {MODELS})")
        if self.initial_state not in INITIAL_STATES:
            problems.append(
                f"unknown initial_state {self.initial_state!r} "
                f"(choose from {INITIAL_STATES})"
            )
        p = self.full_params()
        unknown = sorted(set(p) - set(DEFAULT_PARAMS))
        if unknown:
            problems.append(f"unknown params fields: {unknown}")
        for key, val in p.items():
            if key in DEFAULT_PARAMS and not isinstance(val, (int, float, complex)):
                problems.append(f"params.{key} must be numeric, got {val!r}")
        if self.initial_state == "custom":
            if self.custom_state is None:
                problems.append("initial_state 'custom' needs custom_state")
            else:
                try:
                    dm = _custom_density(self.custom_state)
                    bad = dm.violations(trace_tol=1e-8, eig_tol=1e-8)
                    problems += [f"custom_state: {b}" for b in bad]
                except Exception as exc:  # malformed matrix
                    problems.append(f"custom_state: {exc}")
        if self.sweep_parameter is not None:
            if self.sweep_parameter not in SWEEPABLE:
                problems.append(
                    f"sweep parameter {self.sweep_parameter!r} does not name "
                    f"a numeric field (choose from {SWEEPABLE})"
                )
            if len(self.sweep_values) == 0:
                problems.append("sweep has no values")
            for v in self.sweep_values:
                if not isinstance(v, (int, float)):
                    problems.append(f"sweep value {v!r} is not numeric")
        model = self.model if self.model in MODELS else "pair"
        names = self.observables or self.default_observables()
        known = (
            set(GIANT_DEFAULT_OBSERVABLES)
            if model == "giant"
            else set(PAIR_DEFAULT_OBSERVABLES)
        )
        bad_obs = [n for n in names if n not in known]
        if bad_obs:
            problems.append(f"unknown observables for model {model!r}: {bad_obs}")
        if self.model == "giant" and p.get("Delta_c", 30.0) == 0:
            problems.append("giant model needs Delta_c != 0")
        if self.model == "giant" and self.initial_state in ("plus", "minus"):
            problems.append(
                f"initial state {self.initial_state!r} needs the pair model"
            )
        if self.model == "pair_continuous":
            if p.get("theta", 0.0) < 0:
                problems.append("theta must be >= 0")
            if p.get("theta", 0.0) > 0 and p.get("phi", 1.0) <= 0:
                problems.append("phi must be > 0 when theta > 0")
        if problems:
            raise ConfigError(problems)
        return self

    def default_observables(self):
        if self.model == "giant":
            return GIANT_DEFAULT_OBSERVABLES
        return PAIR_DEFAULT_OBSERVABLES

    def points(self):
        """(label, params-dict) per sweep point (single point if no sweep)."""
        base = self.full_params()
        if self.sweep_parameter is None:
            return [(self.label, base)]
        key = self.sweep_parameter.split(".", 1)[1]
        out = []
        for v in self.sweep_values:
            p = dict(base)
            p[key] = v
            out.append((f"{self.label}_{key}={_fmt_value(v)}", p))
        return out


def _fmt_value(v):
    over_pi = v / math.pi
    if abs(over_pi - round(over_pi, 4)) < 1e-12 and abs(over_pi) > 1e-3:
        return f"{round(over_pi, 4):g}pi"
    return f"{v:g}"


def _custom_density(custom_state):
    from .core import GIANT_BASIS, PAIR_BASIS

    m = np.asarray(custom_state, dtype=complex)
    labels = GIANT_BASIS if m.shape == (2, 2) else PAIR_BASIS
    return DensityMatrix(m, labels)


def _initial_state(config, dim):
    name = config.initial_state
    if name == "custom":
        dm = _custom_density(config.custom_state)
        if dm.dim != dim:
            raise ConfigError(
                [f"custom_state is {dm.dim}x{dm.dim} but the "
                 f"{config.model!r} model needs {dim}x{dim}"]
            )
        return dm
    if name == "ground":
        return DensityMatrix.ground(dim=dim)
    if name == "double_excited":
        return DensityMatrix.double_excited(dim=dim)
    if dim != 4:
        raise ConfigError([f"initial state {name!r} needs the pair model"])
    return DensityMatrix.plus_state() if name == "plus" else DensityMatrix.minus_state()


def derived_quantities(model, params):
    """Exchange rates, Upsilon and coupling rates recorded for provenance."""
    pp = _pair_params(params)
    ex = exchange_rates(pp)
    out = {"Gamma_ex": ex.Gamma_ex, "J_ex": ex.J_ex}
    if pp.Delta_c != 0:
        u = upsilon(pp)
        out["Upsilon"] = {"re": u.real, "im": u.imag}
    if model == "pair_continuous":
        rates = continuous_rates(pp.Gamma, pp.phi, params.get("theta", 0.0))
        out["coupling_rates"] = {
            "Gamma_eff": rates.Gamma_eff,
            "Gamma_ex_eff": rates.Gamma_ex_eff,
            "J_ex_eff": rates.J_ex_eff,
            "J_self": rates.J_self,
            "theta": rates.theta,
        }
        if pp.Delta_c != 0:
            up = upsilon_continuous(pp, rates)
            out["Upsilon_prime"] = {"re": up.real, "im": up.imag}
    return out


def _pair_params(params):
    kw = {k: v for k, v in params.items() if k != "theta"}
    return PairParams(**kw)


def _run_point(args):
    """Worker: one sweep point -> TimeSeries (top level for pickling)."""
    model, params, initial, custom, integ_kw, observables = args
    config = ScenarioConfig(
        model=model,
        params=params,
        initial_state=initial,
        custom_state=custom,
        observables=tuple(observables),
    )
    pp = _pair_params(params)
    if model == "pair":
        rhs = pair_rhs_fn(pp)
        dim = 4
        observers = pair_observers(observables)
    elif model == "pair_continuous":
        rates = continuous_rates(pp.Gamma, pp.phi, params.get("theta", 0.0))
        rhs = continuous_pair_rhs_fn(pp, rates)
        dim = 4
        observers = pair_observers(observables)
    else:
        rhs = giant_rhs_fn(giant_params_from_pair(pp))
        dim = 2
        observers = {n: GIANT_OBSERVERS[n] for n in observables}
    rho0 = _initial_state(config, dim)
    return integrate(rhs, rho0, IntegratorConfig(**integ_kw), observers)


def worker_count(n_points):
    env = os.environ.get("RYDGIANT_WORKERS")
    if env is not None:
        return max(1, int(env))
    return max(1, min(os.cpu_count() or 1, n_points))


def run_scenario(config, out_dir=None, out_format="csv"):
    """Execute a scenario; returns (results, manifest).

    results is an ordered list of dicts with 'label' and either 'series'
    (a TimeSeries) or 'error' (message string).  When out_dir is given,
    data files and manifest.json are written there by a single writer.
    """
    config.validate()
    t0 = time.perf_counter()
    points = config.points()
    observables = tuple(config.observables or config.default_observables())
    integ_kw = asdict(config.integrator)
    jobs = [
        (config.model, params, config.initial_state, config.custom_state,
         integ_kw, observables)
        for _, params in points
    ]
    nworkers = worker_count(len(jobs))
    results = []
    if nworkers == 1 or len(jobs) == 1:
        raw = []
        for job in jobs:
            try:
                raw.append(_run_point(job))
            except Exception as exc:
                raw.append(exc)
    else:
        raw = []
        with concurrent.futures.ProcessPoolExecutor(max_workers=nworkers) as pool:
            futures = [pool.submit(_run_point, job) for job in jobs]
            for fut in futures:
                try:
                    raw.append(fut.result())
                except Exception as exc:
                    raw.append(exc)
    for (label, params), res in zip(points, raw):
        entry = {"label": label, "params": params}
        if isinstance(res, Exception):
            entry["error"] = f"{type(res).__name__}: {res}"
        else:
            entry["series"] = res
        results.append(entry)

    manifest = build_manifest(config, results, time.perf_counter() - t0)
    if out_dir is not None:
        write_outputs(results, manifest, out_dir, out_format, observables)
    return results, manifest


def build_manifest(config, results, wall_time):
    per_traj = []
    for entry in results:
        rec = {"label": entry["label"]}
        try:
            rec["derived"] = derived_quantities(config.model, entry["params"])
        except Exception as exc:
            rec["derived_error"] = str(exc)
        if "error" in entry:
            rec["error"] = entry["error"]
        else:
            s = entry["series"]
            rec["diagnostics"] = {
                "steps": int(s.diagnostics["steps_taken"][-1]),
                "max_trace_error": float(np.max(s.diagnostics["trace_error"])),
                "min_eigenvalue": float(np.min(s.diagnostics["min_eigenvalue"])),
                "degraded": s.degraded,
            }
        per_traj.append(rec)
    cfg_echo = {
        "model": config.model,
        "params": {k: _jsonable(v) for k, v in config.full_params().items()},
        "initial_state": config.initial_state,
        "integrator": asdict(config.integrator),
        "observables": list(config.observables or config.default_observables()),
        "sweep_parameter": config.sweep_parameter,
        "sweep_values": [float(v) for v in config.sweep_values],
        "label": config.label,
    }
    if config.custom_state is not None:
        cfg_echo["custom_state"] = [
            [[complex(c).real, complex(c).imag] for c in row]
            for row in config.custom_state
        ]
    return {
        "config": cfg_echo,
        "code_version": __version__,
        "wall_time_s": wall_time,
        "trajectories": per_traj,
    }


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return v


def _fmt_cell(x):
    if isinstance(x, (float, np.floating)):
        if math.isnan(x):
            return ""
        return f"{float(x):.17g}"
    return f"{x:.17g}"


def export_csv(series, observables, path):
    """CSV: t_us then one column per observable in declared order.

    Undefined samples (NaN sentinels) become empty cells.  Complex
    observables are split into <name>_re / <name>_im columns.  17
    significant digits guarantee full round-trip precision.
    """
    header = ["t_us"]
    getters = []
    for name in observables:
        col = series.column(name)
        if np.iscomplexobj(col):
            header += [f"{name}_re", f"{name}_im"]
            getters.append(("c", col))
        else:
            header.append(name)
            getters.append(("f", col))
    lines = [",".join(header)]
    for i, t in enumerate(series.times):
        cells = [f"{t:.17g}"]
        for kind, col in getters:
            if kind == "c":
                cells += [_fmt_cell(col[i].real), _fmt_cell(col[i].imag)]
            else:
                cells.append(_fmt_cell(col[i]))
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def export_jsonl(series, observables, path):
    """JSON-lines mirror of the CSV records (undefined values as null)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, t in enumerate(series.times):
            rec = {"t_us": float(t)}
            for name in observables:
                col = series.column(name)
                v = col[i]
                if np.iscomplexobj(col):
                    rec[name] = [float(v.real), float(v.imag)]
                else:
                    rec[name] = None if math.isnan(float(v)) else float(v)
            fh.write(json.dumps(rec) + "\n")


def write_outputs(results, manifest, out_dir, out_format, observables):
    os.makedirs(out_dir, exist_ok=True)
    for entry in results:
        if "series" not in entry:
            continue
        fname = entry["label"] + (".csv" if out_format == "csv" else ".jsonl")
        path = os.path.join(out_dir, fname)
        try:
            if out_format == "csv":
                export_csv(entry["series"], observables, path)
            else:
                export_jsonl(entry["series"], observables, path)
        except OSError as exc:
            raise OSError(f"failed writing {path}: {exc}") from exc
    mpath = os.path.join(out_dir, "manifest.json")
    try:
        with open(mpath, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"failed writing {mpath}: {exc}") from exc


def detect_crossing(series, observable, level, direction="up"):
    """First linear-interpolated time the observable crosses ``level``.

    'up' means from <= level to > level, 'down' the reverse.  NaN samples
    (undefined g2 sentinels) are skipped.  Returns None if never.
    """
    t = series.times
    v = np.real(series.column(observable)).astype(float)
    prev_i = None
    for i in range(len(t)):
        if math.isnan(v[i]):
            continue
        if prev_i is not None:
            a, b = v[prev_i], v[i]
            hit = (a <= level < b) if direction == "up" else (a >= level > b)
            if hit:
                if b == a:
                    return float(t[i])
                frac = (level - a) / (b - a)
                return float(t[prev_i] + frac * (t[i] - t[prev_i]))
        elif (v[i] > level and direction == "up") or (
            v[i] < level and direction == "down"
        ):
            return float(t[i])  # already beyond level at first defined sample
        prev_i = i
    return None


def detect_onset(series, observable, threshold):
    """First time the observable exceeds ``threshold`` (None if never)."""
    return detect_crossing(series, observable, threshold, direction="up")


def _fig_params(phi, **over):
    p = {
        "gamma": 0.001, "Gamma": 1.0, "Omega_c": 1.0, "Delta_c": 30.0,
        "phi": phi, "V6": 2.0e4,
    }
    p.update(over)
    return p


def preset_catalog():
    """Named scenario lists reproducing every figure-level curve."""
    phis = (40.0 * math.pi, 40.5 * math.pi, 41.0 * math.pi)
    # sample counts give exact 1.0 us / 0.1 us grids
    long_integ = IntegratorConfig(t_end=2000.0, samples=2001)
    short_integ = IntegratorConfig(t_end=300.0, samples=3001)
    fig3_obs = ("gg", "rr", "plus", "minus", "concurrence", "g2", "coh_r_plus")
    return {
        # population vs giant population for increasing |Delta_c|
        "fig2a": [
            ScenarioConfig(
                model="pair", params=_fig_params(40.5 * math.pi),
                integrator=short_integ, observables=("rr",),
                sweep_parameter="params.Delta_c",
                sweep_values=(10.0, 20.0, 30.0, 60.0), label="pair",
            ),
            ScenarioConfig(
                model="giant", params=_fig_params(40.5 * math.pi),
                integrator=short_integ, observables=("rr",),
                sweep_parameter="params.Delta_c",
                sweep_values=(10.0, 20.0, 30.0, 60.0), label="giant",
            ),
        ],
        # phase-ordered decay plus the undamped gamma=0 giant reference
        "fig2b": [
            ScenarioConfig(
                model="pair", params=_fig_params(phis[0]),
                integrator=short_integ, observables=("rr",),
                sweep_parameter="params.phi", sweep_values=phis, label="pair",
            ),
            ScenarioConfig(
                model="giant",
                params=_fig_params(41.0 * math.pi, gamma=0.0),
                integrator=short_integ, observables=("rr",),
                label="giant_gamma0_phi=41pi",
            ),
        ],
        # long-horizon entanglement, correlation and dressed populations
        "fig3": [
            ScenarioConfig(
                model="pair", params=_fig_params(phis[0]),
                integrator=long_integ, observables=fig3_obs,
                sweep_parameter="params.phi", sweep_values=phis, label="pair",
            ),
        ],
        # the same with spread coupling regions, Theta = 5 pi / 2
        "fig4": [
            ScenarioConfig(
                model="pair_continuous",
                params={**_fig_params(phis[0]), "theta": 2.5 * math.pi},
                integrator=long_integ, observables=fig3_obs,
                sweep_parameter="params.phi", sweep_values=phis,
                label="continuous",
            ),
        ],
    }


def run_preset(name, out_dir=None, out_format="csv"):
    """Run every scenario of a preset; returns list of (results, manifest)."""
    catalog = preset_catalog()
    if name not in catalog:
        raise ConfigError(
            [f"unknown preset {name!r} (available: {sorted(catalog)})"]
        )
    out = []
    for i, scenario in enumerate(catalog[name]):
        sub = None
        if out_dir is not None:
            sub = out_dir if len(catalog[name]) == 1 else os.path.join(
                out_dir, f"{i:02d}_{scenario.model}"
            )
        out.append(run_scenario(scenario, out_dir=sub, out_format=out_format))
    return out
