"""Exponentially distributed coupling regions of angular width Theta.

Each atom couples to the waveguide not at a point but through a coupling
amplitude spread around its contact point,

    nu1(x) = sqrt(Gamma)/Theta * exp(-2|x|/Theta),
    nu2(x) = sqrt(Gamma)/Theta * exp(-2|x - phi|/Theta),

with x measured in accumulated-phase radians.  The decay and exchange
constants become second moments of these distributions against
cos(x - x') and sin|x - x'|; closed forms are implemented in
:func:`continuous_rates` and cross-checked by the independent 2-D adaptive
quadrature of :func:`quadrature_rates`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.integrate import IntegrationWarning, quad

from .pair import pair_rhs_fn, expanded_rhs_fn, _checked_state


class QuadratureError(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class CouplingRates:
    """Modified rates for coupling regions of width theta (theta=0: discrete).

    Gamma_eff and Gamma_ex_eff are the guided decay and dissipative
    exchange, J_ex_eff the coherent exchange, and J_self the Lamb-type
    self-interaction shift of both single-excitation states.
    """

    Gamma_eff: float
    Gamma_ex_eff: float
    J_ex_eff: float
    J_self: float
    theta: float

    def __post_init__(self):
        # complete positivity of the modified two-channel dissipator
        assert abs(self.Gamma_ex_eff) <= self.Gamma_eff * (1.0 + 1e-12), (
            self.Gamma_ex_eff,
            self.Gamma_eff,
        )

    def as_tuple(self):
        return (self.Gamma_eff, self.Gamma_ex_eff, self.J_ex_eff)


def continuous_rates(Gamma, phi, theta):
    """Closed-form modified rates (Gamma', Gamma_ex', J_ex', J').

    theta = 0 reduces exactly to the discrete point-coupling rates (the
    exponential term of J_ex' is removed analytically in that limit, so no
    0*inf is ever evaluated).  phi <= 0 with theta > 0 lies outside the
    validity of the closed form (the derivation orders the two regions
    along the line) and is rejected.
    """
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    if theta == 0.0:
        return CouplingRates(
            Gamma_eff=Gamma,
            Gamma_ex_eff=Gamma * math.cos(phi),
            J_ex_eff=Gamma * math.sin(phi),
            J_self=0.0,
            theta=0.0,
        )
    if phi <= 0:
        raise ValueError(
            f"phi must be > 0 for theta > 0 (got phi={phi}); the ordered-"
            "region closed form does not extrapolate"
        )
    den = (theta**2 + 4.0) ** 2
    g_eff = 16.0 * Gamma / den
    g_ex = 16.0 * Gamma * math.cos(phi) / den
    j_ex = (
        Gamma
        * (
            (8.0 * phi + 2.0 * theta**2 * phi + 12.0 * theta + theta**3)
            * math.exp(-2.0 * phi / theta)
            + 16.0 * math.sin(phi)
        )
        / den
    )
    j_self = Gamma * theta * (theta**2 + 12.0) / den
    return CouplingRates(g_eff, g_ex, j_ex, j_self, theta)


def _nested_quad2d(f, x_lo, x_hi, y_lo, y_hi, eps_inner, eps_outer, kink):
    """Adaptive 2-D quadrature of f(x, y) over a rectangle.

    Outer adaptive pass over x, inner adaptive pass over y; when ``kink``
    is set the inner integrand is only piecewise smooth across y = x and
    the inner pass is told about that breakpoint.  Returns (value,
    error estimate); the estimate combines the outer estimate with the
    accumulated worst inner estimate integrated over the x range.
    """
    inner_worst = 0.0

    def outer(x):
        nonlocal inner_worst
        pts = [x] if (kink and y_lo < x < y_hi) else None
        val, err = quad(
            lambda y: f(x, y),
            y_lo,
            y_hi,
            points=pts,
            epsabs=eps_inner,
            epsrel=0.0,
            limit=200,
        )
        inner_worst = max(inner_worst, err)
        return val

    with warnings.catch_warnings():
        # scipy's slow-convergence heuristic fires on the tight inner
        # tolerances; the explicit post-hoc error-estimate check in
        # quadrature_rates is the actual convergence arbiter.
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err_outer = quad(
            outer, x_lo, x_hi, epsabs=eps_outer, epsrel=0.0, limit=200
        )
    return val, err_outer + inner_worst * (x_hi - x_lo)


def quadrature_rates(Gamma, phi, theta, tol=1e-6):
    """Independent oracle for :func:`continuous_rates` (theta > 0 only).

    Evaluates the four double integrals of the exponential coupling
    distributions against cos(x-y) and sin|x-y| by nested adaptive
    quadrature over a truncated domain (10 widths around each centre,
    truncation error < 1e-8 of the total weight).  ``tol`` is a relative
    target against the magnitude of the rate set; failure to converge
    raises :class:`QuadratureError` carrying the achieved estimate.
    """
    if theta <= 0:
        raise ValueError(f"quadrature oracle needs theta > 0, got {theta}")
    if phi <= 0:
        raise ValueError(f"phi must be > 0, got {phi}")
    a = 2.0 / theta
    amp = Gamma / theta**2
    w = 10.0 * theta

    def nu_pair(center2):
        def weight(x, y):
            return amp * math.exp(-a * (abs(x) + abs(y - center2)))

        return weight

    def integral(center2, trig):
        wgt = nu_pair(center2)
        if trig == "cos":
            f = lambda x, y: wgt(x, y) * math.cos(x - y)
            kink = False
        else:
            f = lambda x, y: wgt(x, y) * math.sin(abs(x - y))
            kink = True
        x_lo, x_hi = -w, w
        y_lo, y_hi = center2 - w, center2 + w
        eps = tol * Gamma * 1e-3
        return _nested_quad2d(
            f, x_lo, x_hi, y_lo, y_hi,
            eps_inner=eps / (4.0 * (x_hi - x_lo)),
            eps_outer=eps / 4.0,
            kink=kink,
        )

    pieces = {
        "Gamma_eff": integral(0.0, "cos"),
        "Gamma_ex_eff": integral(phi, "cos"),
        "J_ex_eff": integral(phi, "sin"),
        "J_self": integral(0.0, "sin"),
    }
    scale = max(abs(v) for v, _ in pieces.values())
    for name, (_, err) in pieces.items():
        if err > tol * scale:
            raise QuadratureError(
                f"quadrature for {name} did not converge: error estimate "
                f"{err:.3e} exceeds {tol:.1e} * scale {scale:.3e}",
                achieved=err / scale,
            )
    return CouplingRates(
        Gamma_eff=pieces["Gamma_eff"][0],
        Gamma_ex_eff=pieces["Gamma_ex_eff"][0],
        J_ex_eff=pieces["J_ex_eff"][0],
        J_self=pieces["J_self"][0],
        theta=theta,
    )


def upsilon_continuous(params, rates):
    """Upsilon' = (Gamma' + Gamma_ex' + i J' + i J_ex') |Omega_c|^2/Delta_c^2."""
    if params.Delta_c == 0:
        raise ValueError("Upsilon' undefined for Delta_c == 0")
    scale = abs(complex(params.Omega_c)) ** 2 / params.Delta_c**2
    return (
        rates.Gamma_eff
        + rates.Gamma_ex_eff
        + 1j * (rates.J_self + rates.J_ex_eff)
    ) * scale


def continuous_pair_rhs(params, rates, rho):
    """Pair master equation with substituted rates and the J' level shift."""
    m = _checked_state(rho)
    return continuous_pair_rhs_fn(params, rates)(m)


def continuous_pair_rhs_fn(params, rates):
    """Compiled linear map for the continuous-coupling pair model."""
    return pair_rhs_fn(
        params, rates=rates.as_tuple(), level_shift=rates.J_self
    )


def continuous_expanded_rhs_fn(params, rates):
    """Scalar twin of :func:`continuous_pair_rhs_fn` (testing aid)."""
    return expanded_rhs_fn(
        params, rates=rates.as_tuple(), level_shift=rates.J_self
    )
