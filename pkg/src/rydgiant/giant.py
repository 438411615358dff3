"""Synthetic two-level giant atom obtained by adiabatic elimination.

After eliminating the far-detuned single-excitation states, the pair decays
through the double transition |rr> <-> |gg| with a complex rate Upsilon
whose real part is the phase-dependent decay and whose imaginary part is
the Lamb shift.  The populations obey a closed linear scalar ODE, so the
model doubles as an exact analytic oracle for the integrator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GIANT_BASIS, as_matrix, dagger
from .pair import exchange_rates


@dataclass(frozen=True)
class GiantParams:
    """Intrinsic rate gamma and complex effective rate Upsilon, 1/us."""

    gamma: float
    Upsilon: complex

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if complex(self.Upsilon).real < -1e-12:
            raise ValueError(
                f"Re(Upsilon) must be >= 0, got {complex(self.Upsilon).real}"
            )


def upsilon(params):
    """Upsilon = (Gamma + Gamma_ex + i J_ex) |Omega_c|^2 / Delta_c^2.

    Requires Delta_c != 0 (the elimination of the single-excitation states
    is undefined on resonance).
    """
    if params.Delta_c == 0:
        raise ValueError("Upsilon undefined for Delta_c == 0")
    ex = exchange_rates(params)
    scale = abs(complex(params.Omega_c)) ** 2 / params.Delta_c**2
    return (params.Gamma + ex.Gamma_ex + 1j * ex.J_ex) * scale


def giant_params_from_pair(pair_params, gamma=None):
    """GiantParams matched to a PairParams set (gamma overridable)."""
    g = pair_params.gamma if gamma is None else gamma
    return GiantParams(gamma=g, Upsilon=upsilon(pair_params))


def giant_rhs(params, rho):
    """d(rho)/dt of the giant-atom master equation on basis {|g>, |r>}.

    d rho_gg = (U + U* + 2 gamma) rho_rr
    d rho_gr = -(U* + gamma) rho_gr
    d rho_rg = -(U  + gamma) rho_rg
    d rho_rr = -(U + U* + 2 gamma) rho_rr
    """
    m = as_matrix(rho)
    if m.shape != (2, 2):
        raise ValueError(f"giant state must be 2x2, got {m.shape}")
    tr_err = abs(np.trace(m) - 1.0)
    herm_err = np.max(np.abs(m - dagger(m)))
    if tr_err > 1e-6 or herm_err > 1e-6:
        raise ValueError(
            f"invalid giant state: |trace-1|={tr_err:.3e}, "
            f"hermiticity error={herm_err:.3e}"
        )
    return giant_rhs_fn(params)(m)


def giant_rhs_fn(params):
    """Compiled linear map for the integrator (no state validation)."""
    u = complex(params.Upsilon)
    g = params.gamma
    total = u + u.conjugate() + 2.0 * g

    def rhs(m):
        d = np.empty((2, 2), dtype=complex)
        d[0, 0] = total * m[1, 1]
        d[0, 1] = -(u.conjugate() + g) * m[0, 1]
        d[1, 0] = -(u + g) * m[1, 0]
        d[1, 1] = -total * m[1, 1]
        return d

    return rhs


def giant_population_analytic(params, t, rr0=1.0):
    """Closed-form rho_rr(t) = rr0 * exp(-(2 Re Upsilon + 2 gamma) t)."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be >= 0")
    if not 0.0 <= rr0 <= 1.0:
        raise ValueError(f"rr0 must lie in [0, 1], got {rr0}")
    rate = 2.0 * complex(params.Upsilon).real + 2.0 * params.gamma
    return rr0 * np.exp(-rate * np.asarray(t, dtype=float))


def giant_state_analytic(params, t, rr0=1.0):
    """Full diagonal state at time t (coherences assumed zero initially)."""
    rr = giant_population_analytic(params, t, rr0)
    m = np.array([[1.0 - rr, 0.0], [0.0, rr]], dtype=complex)
    return m


BASIS = GIANT_BASIS
