"""Shared fixtures; the expensive figure-level trajectories are computed
once per session and reused by unit, property and acceptance tests."""

import math

import numpy as np
import pytest

from rydgiant.core import DensityMatrix, dagger
from rydgiant.continuous import continuous_rates, continuous_pair_rhs_fn
from rydgiant.integrate import IntegratorConfig, integrate
from rydgiant.observables import pair_observers
from rydgiant.pair import PairParams, pair_rhs_fn

PI = math.pi

FIG_OBSERVABLES = ("gg", "rr", "plus", "minus", "concurrence", "g2", "coh_r_plus")

#: pass/fail lines accumulated by the acceptance module, echoed at the end
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_density(rng, dim=4):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ dagger(a)
    return rho / np.trace(rho).real


def random_pure(rng, dim=4):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def fig_params(phi, **over):
    base = dict(gamma=0.001, Gamma=1.0, Omega_c=1.0, Delta_c=30.0, phi=phi)
    base.update(over)
    return PairParams(**base)


def run_pair(params, t_end, samples, rates=None, j_self=0.0, rho0=None,
             observables=FIG_OBSERVABLES, **integ_kw):
    rhs = pair_rhs_fn(params, rates=rates, level_shift=j_self)
    cfg = IntegratorConfig(t_end=t_end, samples=samples, **integ_kw)
    state = DensityMatrix.double_excited() if rho0 is None else rho0
    return integrate(rhs, state, cfg, pair_observers(observables))


def run_continuous(params, theta, t_end, samples, **integ_kw):
    rates = continuous_rates(params.Gamma, params.phi, theta)
    rhs = continuous_pair_rhs_fn(params, rates)
    cfg = IntegratorConfig(t_end=t_end, samples=samples, **integ_kw)
    return integrate(
        rhs, DensityMatrix.double_excited(), cfg, pair_observers(FIG_OBSERVABLES)
    )


@pytest.fixture(scope="session")
def fig3_trajectories():
    """Long-horizon pair runs at the three standard phases."""
    out = {}
    for mphi in (40.0, 40.5, 41.0):
        out[mphi] = run_pair(fig_params(mphi * PI), t_end=2000.0, samples=2001)
    return out


@pytest.fixture(scope="session")
def fig2b_trajectories():
    """Short-horizon population runs, including the 39.5pi mirror phase."""
    out = {}
    for mphi in (39.5, 40.0, 40.5, 41.0):
        out[mphi] = run_pair(
            fig_params(mphi * PI), t_end=300.0, samples=3001,
            observables=("rr",),
        )
    return out


@pytest.fixture(scope="session")
def fig2a_trajectories():
    """Adiabatic-elimination comparison runs over Delta_c."""
    out = {}
    for delta in (10.0, 20.0, 30.0, 60.0):
        out[delta] = run_pair(
            fig_params(40.5 * PI, Delta_c=delta), t_end=300.0, samples=6001,
            observables=("rr",),
        )
    return out


@pytest.fixture(scope="session")
def fig4_trajectories():
    """Continuous-coupling long runs at Theta = 5 pi / 2."""
    theta = 2.5 * PI
    out = {}
    for mphi in (40.0, 41.0):
        out[mphi] = run_continuous(
            fig_params(mphi * PI), theta, t_end=2000.0, samples=2001
        )
    return out
