"""Measured quantities: populations, Wootters concurrence, photon g2,
dressed-state bookkeeping and the dressed-rate consistency check.

Conventions fixed here once:

* ``rho*`` inside the spin-flipped state ``rho~ = (sy x sy) rho* (sy x sy)``
  means complex conjugation in the fixed product basis (the basis
  ``SIGMA_YY`` is written in); conjugation is basis dependent.
* The concurrence eigenvalues come from the non-Hermitian product
  ``rho rho~`` with lambda_i = sqrt(max(Re mu_i, 0)); this equals the
  matrix-square-root form of the usual definition but avoids two matrix
  square roots.  Eigenvalues below EIG_ZERO_TOL (unit-trace scale) are
  treated as exact zeros of the rank-deficient product.
* g2 is undefined (0/0) once the single-atom marginals carry no
  excitation; that is reported as ``None``, never as a division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    EIG_ZERO_TOL,
    SIGMA_YY,
    DensityMatrix,
    as_matrix,
    eigenvalues,
    partial_trace,
)
from .pair import exchange_rates

SQRT2 = math.sqrt(2.0)

#: denominator floor below which g2 is reported as undefined
G2_DENOM_TOL = 1e-12


@dataclass(frozen=True)
class ObservableSet:
    """One sample's worth of observables (g2 is None when undefined)."""

    populations: dict
    concurrence: float
    g2: float | None
    trace_error: float
    min_eigenvalue: float
    coherence_r_plus: complex = 0.0


def concurrence(rho):
    """Wootters concurrence of a two-qubit state, clamped to [0, 1]."""
    m = as_matrix(rho)
    if m.shape != (4, 4):
        raise ValueError(f"concurrence needs a 4x4 state, got {m.shape}")
    flipped = SIGMA_YY @ m.conj() @ SIGMA_YY
    mu = np.real(eigenvalues(m @ flipped, context="rho*rho_tilde"))
    mu[mu < EIG_ZERO_TOL] = 0.0
    lam = np.sort(np.sqrt(mu))[::-1]
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(max(c, 0.0), 1.0))


def concurrence_pure(vec):
    """2 |a d - b c| for a pure state; independent oracle for concurrence."""
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return 2.0 * abs(v[0] * v[3] - v[1] * v[2])


def g2(rho):
    """Equal-time photon correlation rho_rr / (rho_r1 rho_r2).

    The marginals are single-atom Rydberg populations from the reduced
    states.  Returns None when the denominator is below G2_DENOM_TOL.
    """
    m = as_matrix(rho)
    if m.shape != (4, 4):
        raise ValueError(f"g2 needs a 4x4 state, got {m.shape}")
    r1 = float(np.real(partial_trace(m, keep=1)[1, 1]))
    r2 = float(np.real(partial_trace(m, keep=2)[1, 1]))
    den = r1 * r2
    if den < G2_DENOM_TOL:
        return None
    return float(np.real(m[3, 3]) / den)


def dressed_populations(rho):
    """(rho_++, rho_--, <rr|rho|+>) in the |+-> = (|r1g2> +- |g1r2>)/sqrt2 basis."""
    m = as_matrix(rho)
    if m.shape != (4, 4):
        raise ValueError(f"dressed_populations needs a 4x4 state, got {m.shape}")
    sym = 0.5 * (m[1, 1] + m[2, 2] + m[1, 2] + m[2, 1])
    asym = 0.5 * (m[1, 1] + m[2, 2] - m[1, 2] - m[2, 1])
    coh = (m[3, 1] + m[3, 2]) / SQRT2
    return float(sym.real), float(asym.real), complex(coh)


def observable_set(rho):
    """Full ObservableSet of a pair state (used per integrator sample)."""
    m = as_matrix(rho)
    plus, minus, coh = dressed_populations(m)
    dm = rho if isinstance(rho, DensityMatrix) else DensityMatrix(m)
    pops = {
        "gg": float(m[0, 0].real),
        "r1g2": float(m[1, 1].real),
        "g1r2": float(m[2, 2].real),
        "rr": float(m[3, 3].real),
        "plus": plus,
        "minus": minus,
    }
    return ObservableSet(
        populations=pops,
        concurrence=concurrence(m),
        g2=g2(m),
        trace_error=float(dm.trace_error()),
        min_eigenvalue=dm.min_eigenvalue(),
        coherence_r_plus=coh,
    )


#: observable extractors for the pair model, keyed by column name
PAIR_OBSERVERS = {
    "gg": lambda m: m[0, 0].real,
    "r1g2": lambda m: m[1, 1].real,
    "g1r2": lambda m: m[2, 2].real,
    "rr": lambda m: m[3, 3].real,
    "plus": lambda m: dressed_populations(m)[0],
    "minus": lambda m: dressed_populations(m)[1],
    "concurrence": concurrence,
    "g2": lambda m: (lambda v: math.nan if v is None else v)(g2(m)),
    "coh_r_plus": lambda m: dressed_populations(m)[2],
}

#: observable extractors for the giant model
GIANT_OBSERVERS = {
    "gg": lambda m: m[0, 0].real,
    "rr": lambda m: m[1, 1].real,
}


def pair_observers(names):
    unknown = [n for n in names if n not in PAIR_OBSERVERS]
    if unknown:
        raise ValueError(f"unknown observables: {unknown}")
    return {n: PAIR_OBSERVERS[n] for n in names}


def dressed_rate_check(params, series):
    """Max residual of the dressed-state rate equations along a trajectory.

    Central differences of the sampled rho_-- and rho_++ against

        d rho_-- = -(gamma + Gamma - Gamma_ex) rho_-- + gamma rho_rr
        d rho_++ = -(gamma + Gamma + Gamma_ex) rho_++ + gamma rho_rr
                   + i sqrt(2) (Omega_c rho_{+r} - Omega_c* rho_{r+})

    with rho_{r+} = <rr|rho|+>.  The drive line is the exact expansion of
    the generator in the dressed basis (the sqrt(2) comes from the
    normalised |+>); it vanishes identically for the minus state.
    Requires a uniform grid with at least 3 samples.
    """
    t = np.asarray(series.times, dtype=float)
    if t.size < 3:
        raise ValueError("dressed_rate_check needs at least 3 samples")
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-8, atol=1e-12):
        raise ValueError("dressed_rate_check needs a uniform sample grid")
    h = dt[0]
    for col in ("plus", "minus", "rr", "coh_r_plus"):
        if col not in series.columns:
            raise ValueError(f"trajectory lacks required observable {col!r}")
    ex = exchange_rates(params)
    g_minus = params.gamma + params.Gamma - ex.Gamma_ex
    g_plus = params.gamma + params.Gamma + ex.Gamma_ex
    pp = np.real(series.columns["plus"])
    pm = np.real(series.columns["minus"])
    rr = np.real(series.columns["rr"])
    crp = np.asarray(series.columns["coh_r_plus"], dtype=complex)
    om = complex(params.Omega_c)

    dpm = (pm[2:] - pm[:-2]) / (2.0 * h)
    dpp = (pp[2:] - pp[:-2]) / (2.0 * h)
    mid = slice(1, -1)
    res_minus = dpm - (-g_minus * pm[mid] + params.gamma * rr[mid])
    drive = 1j * SQRT2 * (om * crp.conj() - om.conjugate() * crp)
    res_plus = dpp - (
        -g_plus * pp[mid] + params.gamma * rr[mid] + np.real(drive[mid])
    )
    return float(max(np.max(np.abs(res_minus)), np.max(np.abs(res_plus))))
