"""Command-line surface: run scenario files, presets, rate tables,
geometry helpers and the selftest.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 selftest failure.
"""

from __future__ import annotations

import math
import sys

import click

from .config import example_config, load_config
from .continuous import QuadratureError, continuous_rates, quadrature_rates, upsilon_continuous
from .geometry import LabGeometry
from .giant import upsilon
from .integrate import IntegrationError
from .pair import PairParams, exchange_rates
from .scenarios import ConfigError, preset_catalog, run_preset, run_scenario
from .selftest import run_selftest

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_SELFTEST = 4


@click.group()
@click.version_option()
def main():
    """Driven Rydberg pair on a photonic-crystal waveguide: simulators,
    rate tables and figure-level presets."""


def _echo_manifest_summary(results, manifest):
    failed = 0
    for entry in results:
        if "error" in entry:
            failed += 1
            click.echo(f"  {entry['label']}: FAILED ({entry['error']})")
        else:
            diag = entry["series"].diagnostics
            click.echo(
                f"  {entry['label']}: {len(entry['series'].times)} samples, "
                f"{diag['steps_taken'][-1]} steps, "
                f"max trace err {diag['trace_error'].max():.2e}"
            )
    click.echo(f"wall time {manifest['wall_time_s']:.2f} s")
    return failed


@main.command()
@click.argument("config_file", type=click.Path())
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Override a config entry, e.g. --set params.phi=40.5pi")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Output directory (overrides the config's [output]).")
@click.option("--format", "out_format",
              type=click.Choice(["csv", "json-lines"]), default=None)
def run(config_file, overrides, out_dir, out_format):
    """Run a scenario described by a TOML config file."""
    try:
        config, output = load_config(config_file, overrides)
    except ConfigError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
    if out_dir is None and output is not None:
        out_dir = output["path"]
    if out_format is None:
        out_format = (output or {}).get("format", "csv")
    try:
        results, manifest = run_scenario(config, out_dir=out_dir,
                                         out_format=out_format)
    except IntegrationError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    failed = _echo_manifest_summary(results, manifest)
    if out_dir:
        click.echo(f"wrote data + manifest to {out_dir}")
    if failed:
        sys.exit(EXIT_NUMERICAL)


@main.command("preset")
@click.argument("name", required=False)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--format", "out_format",
              type=click.Choice(["csv", "json-lines"]), default="csv")
@click.option("--list", "list_only", is_flag=True, help="List preset names.")
def preset_cmd(name, out_dir, out_format, list_only):
    """Run a figure-level preset (fig2a, fig2b, fig3, fig4)."""
    catalog = preset_catalog()
    if list_only or name is None:
        for key, scenarios in sorted(catalog.items()):
            models = ", ".join(s.model for s in scenarios)
            click.echo(f"{key}: {models}")
        return
    try:
        outputs = run_preset(name, out_dir=out_dir, out_format=out_format)
    except ConfigError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
    except IntegrationError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    failed = 0
    for results, manifest in outputs:
        failed += _echo_manifest_summary(results, manifest)
    if out_dir:
        click.echo(f"wrote data + manifests under {out_dir}")
    if failed:
        sys.exit(EXIT_NUMERICAL)


@main.command()
@click.option("--phi", required=True, help="Accumulated phase (pi-literals ok).")
@click.option("--theta", default="0", help="Coupling width (pi-literals ok).")
@click.option("--gamma-guided", "gamma_guided", default=1.0, show_default=True,
              help="Guided decay rate Gamma, 1/us.")
@click.option("--omega-c", default=1.0, show_default=True)
@click.option("--delta-c", default=30.0, show_default=True)
@click.option("--check/--no-check", default=True,
              help="Cross-check closed forms against the quadrature oracle.")
def rates(phi, theta, gamma_guided, omega_c, delta_c, check):
    """Print discrete and continuous coupling-rate tables."""
    from .scenarios import parse_number

    try:
        phi_v = parse_number(phi)
        theta_v = parse_number(theta)
    except ValueError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
    params = PairParams(Gamma=gamma_guided, Omega_c=omega_c,
                        Delta_c=delta_c, phi=phi_v)
    ex = exchange_rates(params)
    click.echo(f"phi = {phi_v:.9g} rad = {phi_v / math.pi:.6g} pi")
    click.echo("discrete couplings (theta = 0):")
    click.echo(f"  Gamma     = {params.Gamma:.9g}")
    click.echo(f"  Gamma_ex  = {ex.Gamma_ex:.9g}")
    click.echo(f"  J_ex      = {ex.J_ex:.9g}")
    u = upsilon(params)
    click.echo(f"  Upsilon   = {u.real:.9g} + {u.imag:.9g}i")
    if theta_v <= 0:
        return
    try:
        c = continuous_rates(gamma_guided, phi_v, theta_v)
    except ValueError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
    click.echo(f"continuous couplings (theta = {theta_v / math.pi:.6g} pi):")
    click.echo(f"  Gamma'    = {c.Gamma_eff:.9g}")
    click.echo(f"  Gamma_ex' = {c.Gamma_ex_eff:.9g}")
    click.echo(f"  J_ex'     = {c.J_ex_eff:.9g}")
    click.echo(f"  J'        = {c.J_self:.9g}")
    up = upsilon_continuous(params, c)
    click.echo(f"  Upsilon'  = {up.real:.9g} + {up.imag:.9g}i")
    if check:
        try:
            q = quadrature_rates(gamma_guided, phi_v, theta_v, tol=1e-6)
        except QuadratureError as exc:
            click.echo(f"quadrature check failed: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)
        scale = max(abs(c.Gamma_eff), abs(c.Gamma_ex_eff),
                    abs(c.J_ex_eff), abs(c.J_self))
        worst = max(
            abs(c.Gamma_eff - q.Gamma_eff),
            abs(c.Gamma_ex_eff - q.Gamma_ex_eff),
            abs(c.J_ex_eff - q.J_ex_eff),
            abs(c.J_self - q.J_self),
        ) / scale
        click.echo(f"quadrature check: relative deviation {worst:.3e}")


@main.command()
@click.option("--c6", default=2.0 * math.pi * 2.8e12, show_default=True,
              help="vdW coefficient, rad/s um^6.")
@click.option("--r", default=3.1, show_default=True, help="Distance R, um.")
@click.option("--angle", default=0.0, show_default=True,
              help="Misalignment angle, rad.")
@click.option("--omega-e", default=2.0 * math.pi * 1009e12, show_default=True,
              help="Transition frequency, rad/s.")
@click.option("--vg", default=0.5 * 299792458.0, show_default=True,
              help="Group velocity, m/s.")
@click.option("--rbar", default=583.0, show_default=True,
              help="Rydberg orbital radius, nm.")
@click.option("--h", "h_dist", default=449.0, show_default=True,
              help="Nucleus to evanescent surface, nm.")
def geometry(c6, r, angle, omega_e, vg, rbar, h_dist):
    """Translate lab geometry into model parameters (V6, phi, Theta)."""
    try:
        geo = LabGeometry(c6=c6, r=r, misalign_angle=angle, omega_e=omega_e,
                          v_g=vg, r_bar=rbar, h=h_dist)
        summary = geo.summary()
    except ValueError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
    for key, val in summary.items():
        if isinstance(val, float):
            click.echo(f"{key:16s} = {val:.9g}")
        else:
            click.echo(f"{key:16s} = {val}")


@main.command()
def selftest():
    """Run the oracle/invariant suite; exit 4 on any failure."""
    ok, results = run_selftest()
    for name, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        click.echo(f"[{status}] {name}: {detail}")
    if not ok:
        sys.exit(EXIT_SELFTEST)
    click.echo("all selftests passed")


@main.command("example-config")
def example_config_cmd():
    """Print a ready-to-edit scenario file."""
    click.echo(example_config(), nl=False)


if __name__ == "__main__":
    main()
