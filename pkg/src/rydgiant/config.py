"""TOML scenario files and command-line overrides.

The file format mirrors ScenarioConfig: top-level keys plus [params],
[integrator], [sweep] and [output] tables.  Numeric literals may carry a
'pi' suffix ("40.5pi") anywhere a parameter value is expected.  Overrides
are dotted assignments like ``params.phi=40.5pi``.  Validation is
exhaustive: every problem found is reported, not just the first.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from .integrate import IntegratorConfig
from .scenarios import ConfigError, ScenarioConfig, parse_number

_TOP_KEYS = {
    "model", "initial_state", "label", "observables", "custom_state",
    "params", "integrator", "sweep", "output",
}
_INTEGRATOR_KEYS = {
    "mode", "dt", "rel_tol", "abs_tol", "t_end", "samples", "sample_times",
    "max_steps", "keep_states",
}


def load_config(path, overrides=()):
    """Parse a TOML scenario file, apply overrides, build ScenarioConfig.

    Returns (config, output) where output is {'path': ..., 'format': ...}
    or None.  Raises ConfigError listing every violation.
    """
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError([f"config file not found: {path}"]) from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"config file {path} is not valid TOML: {exc}"]) from None
    return config_from_dict(raw, overrides)


def apply_override(raw, assignment):
    """Apply one 'dotted.key=value' assignment to the raw config dict."""
    if "=" not in assignment:
        raise ValueError(f"override {assignment!r} is not of the form key=value")
    key, _, value = assignment.partition("=")
    parts = key.strip().split(".")
    node = raw
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ValueError(f"override {assignment!r}: {p!r} is not a table")
    node[parts[-1]] = value.strip()


def _coerce_number(value, where, problems):
    try:
        return parse_number(value)
    except ValueError as exc:
        problems.append(f"{where}: {exc}")
        return 0.0


def _coerce_entry(value, where, problems):
    """Config cell -> float or complex ([re, im] pairs allowed)."""
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re = _coerce_number(value[0], where, problems)
        im = _coerce_number(value[1], where, problems)
        return complex(re, im)
    return _coerce_number(value, where, problems)


def config_from_dict(raw, overrides=()):
    raw = {k: (dict(v) if isinstance(v, dict) else v) for k, v in raw.items()}
    problems = []
    for assignment in overrides:
        try:
            apply_override(raw, assignment)
        except ValueError as exc:
            problems.append(str(exc))

    unknown = sorted(set(raw) - _TOP_KEYS)
    if unknown:
        problems.append(f"unknown top-level keys: {unknown}")

    params = {}
    for key, val in dict(raw.get("params", {})).items():
        params[key] = _coerce_entry(val, f"params.{key}", problems)

    integ_raw = dict(raw.get("integrator", {}))
    unknown = sorted(set(integ_raw) - _INTEGRATOR_KEYS)
    if unknown:
        problems.append(f"unknown integrator keys: {unknown}")
        for k in unknown:
            integ_raw.pop(k)
    for key in ("dt", "rel_tol", "abs_tol", "t_end"):
        if key in integ_raw:
            integ_raw[key] = _coerce_number(
                integ_raw[key], f"integrator.{key}", problems
            )
    for key in ("samples", "max_steps"):
        if key in integ_raw:
            try:
                integ_raw[key] = int(integ_raw[key])
            except (TypeError, ValueError):
                problems.append(f"integrator.{key} must be an integer")
                integ_raw.pop(key)
    if "sample_times" in integ_raw and integ_raw["sample_times"] is not None:
        integ_raw["sample_times"] = tuple(
            _coerce_number(v, "integrator.sample_times", problems)
            for v in integ_raw["sample_times"]
        )
    if "keep_states" in integ_raw:
        v = integ_raw["keep_states"]
        if isinstance(v, str):  # reaches here via --set overrides
            low = v.strip().lower()
            if low in ("true", "1", "yes"):
                v = True
            elif low in ("false", "0", "no"):
                v = False
            else:
                problems.append(
                    f"integrator.keep_states must be boolean, got {v!r}"
                )
                v = False
        integ_raw["keep_states"] = bool(v)
    integ_raw.setdefault("t_end", 300.0)
    try:
        integrator = IntegratorConfig(**integ_raw)
    except (TypeError, ValueError) as exc:
        problems.append(f"integrator: {exc}")
        integrator = IntegratorConfig(t_end=300.0)

    sweep_param = None
    sweep_values = ()
    if "sweep" in raw:
        sweep = dict(raw["sweep"])
        sweep_param = sweep.get("parameter")
        if sweep_param is None:
            problems.append("sweep table needs a 'parameter' key")
        vals = sweep.get("values", [])
        if not isinstance(vals, (list, tuple)):
            problems.append("sweep.values must be a list")
            vals = []
        sweep_values = tuple(
            _coerce_number(v, "sweep.values", problems) for v in vals
        )

    custom = raw.get("custom_state")
    if custom is not None:
        try:
            rows = [
                [_coerce_entry(c, "custom_state", problems) for c in row]
                for row in custom
            ]
            custom = tuple(tuple(row) for row in np.asarray(rows, dtype=complex).tolist())
        except (TypeError, ValueError) as exc:
            problems.append(f"custom_state: {exc}")
            custom = None

    output = None
    if "output" in raw:
        out = dict(raw["output"])
        fmt = out.get("format", "csv")
        if fmt not in ("csv", "json-lines"):
            problems.append(
                f"output.format must be 'csv' or 'json-lines', got {fmt!r}"
            )
        if "path" not in out:
            problems.append("output table needs a 'path' key")
        output = {"path": out.get("path", "."), "format": fmt}

    observables = tuple(raw.get("observables", ()))
    config = ScenarioConfig(
        model=raw.get("model", "pair"),
        params=params,
        initial_state=raw.get("initial_state", "double_excited"),
        custom_state=custom,
        integrator=integrator,
        observables=observables,
        sweep_parameter=sweep_param,
        sweep_values=sweep_values,
        label=raw.get("label", "scenario"),
    )
    try:
        config.validate()
    except ConfigError as exc:
        problems.extend(exc.problems)
    if problems:
        raise ConfigError(problems)
    return config, output


def example_config():
    """A ready-to-edit scenario file (printed by the CLI)."""
    return """\
# rydgiant scenario file
model = "pair"                 # pair | giant | pair_continuous
initial_state = "double_excited"
label = "demo"
observables = ["rr", "minus", "plus", "concurrence", "g2"]

[params]
gamma = 0.001                  # intrinsic decay, 1/us
Gamma = 1.0                    # guided decay, 1/us
Omega_c = 1.0                  # drive amplitude, 1/us
Delta_c = 30.0                 # drive detuning, 1/us
phi = "40.5pi"                 # accumulated phase (pi-literals allowed)
V6 = 2e4                       # vdW shift, 1/us (provenance only)
theta = 0.0                    # coupling width, pair_continuous only

[integrator]
mode = "adaptive"              # adaptive | fixed
t_end = 300.0
samples = 1500
rel_tol = 1e-8
abs_tol = 1e-10

[sweep]
parameter = "params.phi"
values = ["40pi", "40.5pi", "41pi"]

[output]
path = "out/demo"
format = "csv"                 # csv | json-lines
"""
