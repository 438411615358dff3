"""Condensed oracle/invariant suite behind the ``selftest`` CLI command.

Each check returns (name, passed, detail).  These are the fast structural
oracles (dual-route generator equivalence, quadrature vs closed forms,
concurrence against the pure-state formula, analytic giant decay); the
full figure-level acceptance runs live in the test suite.
"""

from __future__ import annotations

import math

import numpy as np

from .continuous import continuous_rates, quadrature_rates
from .core import DensityMatrix, dagger
from .giant import giant_params_from_pair, giant_population_analytic, giant_rhs_fn
from .integrate import IntegratorConfig, convergence_order, integrate
from .observables import concurrence, concurrence_pure
from .pair import PairParams, expanded_rhs_fn, pair_rhs_fn


def _random_state(rng, dim=4):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ dagger(a)
    return rho / np.trace(rho).real


def check_dual_rhs(n=200, seed=7):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        p = PairParams(
            gamma=rng.uniform(0.0, 0.1),
            Gamma=rng.uniform(0.1, 2.0),
            Omega_c=complex(rng.normal(), rng.normal()),
            Delta_c=rng.uniform(5.0, 50.0),
            phi=rng.uniform(0.0, 50.0 * math.pi),
        )
        rho = _random_state(rng)
        diff = np.max(np.abs(pair_rhs_fn(p)(rho) - expanded_rhs_fn(p)(rho)))
        worst = max(worst, float(diff))
    return ("dual-route generator equivalence", worst < 1e-12,
            f"max deviation {worst:.3e} over {n} random states (tol 1e-12)")


def check_quadrature():
    worst = 0.0
    for theta, phi in ((1.0, 2.0 * math.pi), (2.5 * math.pi, 41.0 * math.pi)):
        c = continuous_rates(1.0, phi, theta)
        q = quadrature_rates(1.0, phi, theta, tol=1e-6)
        scale = max(abs(c.Gamma_eff), abs(c.Gamma_ex_eff),
                    abs(c.J_ex_eff), abs(c.J_self))
        diff = max(
            abs(c.Gamma_eff - q.Gamma_eff),
            abs(c.Gamma_ex_eff - q.Gamma_ex_eff),
            abs(c.J_ex_eff - q.J_ex_eff),
            abs(c.J_self - q.J_self),
        )
        worst = max(worst, diff / scale)
    return ("closed-form rates vs quadrature oracle", worst < 1e-6,
            f"max relative deviation {worst:.3e} (tol 1e-6)")


def check_concurrence(n=200, seed=11):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        worst = max(
            worst, abs(concurrence(np.outer(v, v.conj())) - concurrence_pure(v))
        )
    return ("concurrence vs pure-state formula", worst < 1e-9,
            f"max deviation {worst:.3e} over {n} random pure states (tol 1e-9)")


def check_giant_analytic():
    p = PairParams(phi=40.0 * math.pi)
    gp = giant_params_from_pair(p)
    cfg = IntegratorConfig(t_end=300.0, samples=601, rel_tol=1e-11, abs_tol=1e-13)
    ts = integrate(
        giant_rhs_fn(gp), DensityMatrix.double_excited(dim=2), cfg,
        {"rr": lambda m: m[1, 1].real},
    )
    dev = float(np.max(np.abs(
        ts.columns["rr"] - giant_population_analytic(gp, ts.times)
    )))
    return ("giant-atom numeric vs analytic decay", dev < 1e-9,
            f"max deviation {dev:.3e} (tol 1e-9)")


def check_rk4_order():
    p = PairParams(phi=40.0 * math.pi)
    order = convergence_order(
        pair_rhs_fn(p), DensityMatrix.double_excited().matrix, t_end=2.0, dt=0.01
    )
    return ("fixed-step convergence order", order >= 3.7,
            f"Richardson estimate {order:.3f} (needs >= 3.7)")


ALL_CHECKS = (
    check_dual_rhs,
    check_quadrature,
    check_concurrence,
    check_giant_analytic,
    check_rk4_order,
)


def run_selftest():
    """Run every check; returns (all_passed, [(name, passed, detail), ...])."""
    results = [check() for check in ALL_CHECKS]
    return all(ok for _, ok, _ in results), results
