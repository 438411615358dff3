"""Two-atom four-level master equation for a driven Rydberg pair on a PCW.

Two independent right-hand-side routes are provided on purpose:

* :func:`pair_rhs` builds the generator from operator algebra
  (Hamiltonian commutator + Lindblad/cross dissipators), and
* :func:`expanded_rhs` is a hand-transcription of the generator expanded
  element by element in the fixed four-level basis.

Their agreement to 1e-12 on random states is the primary defence against
transcription errors in the 15 coupled coherence equations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    PAIR_BASIS,
    SIGMA_M1,
    SIGMA_M2,
    as_matrix,
    cross_dissipator,
    dagger,
    lindblad_dissipator,
    matrix_unit,
)

#: trace/Hermiticity tolerance beyond which an input state is rejected
STATE_TOL = 1e-6

# Intrinsic decay is one jump operator per atom: each atom's lowering
# operator spans both of its transitions (|r1g2>->|gg| together with
# |rr>->|g1r2|, and likewise for atom 2).  Splitting these into four
# independent transition channels would drop the cross-transition feeds
# (e.g. the gamma*rho_23 term in d rho_01) that the element-wise equations
# carry.
SIGMA_M_ATOM1 = matrix_unit(0, 1) + matrix_unit(2, 3)
SIGMA_M_ATOM2 = matrix_unit(0, 2) + matrix_unit(1, 3)


@dataclass(frozen=True)
class PairParams:
    """Physical rates and detunings of the pair model, all in 1/us.

    Quoted MHz/kHz/GHz magnitudes are read as angular frequencies
    (1 MHz -> 1.0/us, 1 kHz -> 0.001/us).  ``V6`` is carried for
    provenance and regime checks only; it does not enter the rotating-frame
    generator (it is absorbed into the definition of ``Delta_c``).
    """

    gamma: float = 0.001
    Gamma: float = 1.0
    Omega_c: complex = 1.0
    Delta_c: float = 30.0
    phi: float = 40.5 * math.pi
    V6: float = 2.0e4

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.Gamma < 0:
            raise ValueError(f"Gamma must be >= 0, got {self.Gamma}")
        gamma_ex = self.Gamma * math.cos(self.phi)
        # |cos| <= 1 makes this automatic; assert it anyway.
        assert abs(gamma_ex) <= self.Gamma + 1e-12
        if self.V6 and abs(self.Delta_c) > 0.1 * abs(self.V6):
            warnings.warn(
                f"Delta_c={self.Delta_c} is not small against V6={self.V6}; "
                "the four-level reduction assumes Delta_c << V6",
                stacklevel=2,
            )

    def replace(self, **kw):
        d = {
            "gamma": self.gamma,
            "Gamma": self.Gamma,
            "Omega_c": self.Omega_c,
            "Delta_c": self.Delta_c,
            "phi": self.phi,
            "V6": self.V6,
        }
        d.update(kw)
        return PairParams(**d)


@dataclass(frozen=True)
class ExchangeRates:
    """Coherent (J_ex) and dissipative (Gamma_ex) exchange rates, 1/us."""

    J_ex: float
    Gamma_ex: float


def exchange_rates(params):
    """J_ex = Gamma sin(phi), Gamma_ex = Gamma cos(phi)."""
    return ExchangeRates(
        J_ex=params.Gamma * math.sin(params.phi),
        Gamma_ex=params.Gamma * math.cos(params.phi),
    )


def atomic_hamiltonian(params, j_ex=None, level_shift=0.0):
    """Rotating-frame pair Hamiltonian on the fixed four-level basis.

    Detuning on both single-excitation states, waveguide-mediated exchange
    between them, and the drive on the two upper transitions.  ``j_ex``
    and ``level_shift`` exist so the continuous-coupling model can reuse
    this construction with modified constants.
    """
    if j_ex is None:
        j_ex = exchange_rates(params).J_ex
    om = complex(params.Omega_c)
    h = (params.Delta_c + level_shift) * (matrix_unit(1, 1) + matrix_unit(2, 2))
    h = h + 0.5 * j_ex * (matrix_unit(1, 2) + matrix_unit(2, 1))
    drive = om * (matrix_unit(3, 1) + matrix_unit(3, 2))
    return h + drive + dagger(drive)


def _checked_state(rho):
    m = as_matrix(rho)
    if m.shape != (4, 4):
        raise ValueError(f"pair state must be 4x4, got {m.shape}")
    tr_err = abs(np.trace(m) - 1.0)
    herm_err = np.max(np.abs(m - dagger(m)))
    if tr_err > STATE_TOL or herm_err > STATE_TOL:
        raise ValueError(
            f"invalid pair state: |trace-1|={tr_err:.3e}, "
            f"hermiticity error={herm_err:.3e} (tolerance {STATE_TOL})"
        )
    return m


def pair_rhs(params, rho):
    """d(rho)/dt of the pair master equation, operator-algebra route.

    -i[H, rho] + gamma * sum_{atoms} L[sigma_-^(atom)]
    + Gamma * sum_{j=1,2} L[sigma_-^j]
    + Gamma_ex * (cross(sigma_-^1, sigma_-^2) + H.c.)
    """
    m = _checked_state(rho)
    return pair_rhs_fn(params)(m)


def pair_rhs_fn(params, rates=None, level_shift=0.0):
    """Compiled linear map rho -> d(rho)/dt with all constants prebuilt.

    ``rates`` optionally overrides (Gamma, Gamma_ex, J_ex) and
    ``level_shift`` adds an equal energy shift of both single-excitation
    states; together they express the continuous-coupling generalisation.
    No state validation: this is the integrator workhorse and must stay a
    plain linear map.
    """
    ex = exchange_rates(params)
    gamma_w, gamma_ex, j_ex = params.Gamma, ex.Gamma_ex, ex.J_ex
    if rates is not None:
        gamma_w, gamma_ex, j_ex = rates
    h = atomic_hamiltonian(params, j_ex=j_ex, level_shift=level_shift)
    gam = params.gamma

    # Sandwich channels (weight, L, R) contributing w * L rho R; the
    # anticommutator halves are folded into the non-Hermitian drift
    # A = -iH - K/2 with K the weighted sum of L+L (plus the cross term's
    # Hermitian E12+E21 block).
    channels = [
        (gam, SIGMA_M_ATOM1, dagger(SIGMA_M_ATOM1)),
        (gam, SIGMA_M_ATOM2, dagger(SIGMA_M_ATOM2)),
        (gamma_w, SIGMA_M1, dagger(SIGMA_M1)),
        (gamma_w, SIGMA_M2, dagger(SIGMA_M2)),
        (gamma_ex, SIGMA_M1, dagger(SIGMA_M2)),
        (gamma_ex, SIGMA_M2, dagger(SIGMA_M1)),
    ]
    k = gam * (dagger(SIGMA_M_ATOM1) @ SIGMA_M_ATOM1
               + dagger(SIGMA_M_ATOM2) @ SIGMA_M_ATOM2)
    k = k + gamma_w * (dagger(SIGMA_M1) @ SIGMA_M1 + dagger(SIGMA_M2) @ SIGMA_M2)
    k = k + gamma_ex * (matrix_unit(1, 2) + matrix_unit(2, 1))
    drift = -1j * h - 0.5 * k
    # single batched pipeline sum_i L_i rho R_i, with the drift expressed as
    # (drift rho I) + (I rho drift+); the RHS runs millions of times per
    # trajectory, so it must stay at a handful of numpy calls
    eye = np.eye(4, dtype=complex)
    active = [(w, op, opd) for w, op, opd in channels if w != 0.0]
    left = np.stack([drift, eye] + [w * op for w, op, _ in active])
    right = np.stack([eye, dagger(drift)] + [opd for _, _, opd in active])

    def rhs(m):
        return ((left @ m) @ right).sum(axis=0)

    return rhs


def expanded_rhs(params, rho):
    """d(rho)/dt transcribed element by element in the four-level basis.

    Fifteen scalar equations plus the trace constraint.  Written against
    the same drive-sign convention as the Hamiltonian of
    :func:`atomic_hamiltonian` (drive amplitude attached to the raising
    operators), so it must agree with :func:`pair_rhs` identically.
    """
    m = _checked_state(rho)
    return expanded_rhs_fn(params)(m)


def expanded_rhs_fn(params, rates=None, level_shift=0.0):
    """Scalar-arithmetic twin of :func:`pair_rhs_fn` (same overrides)."""
    ex = exchange_rates(params)
    G, Gex, Jex = params.Gamma, ex.Gamma_ex, ex.J_ex
    if rates is not None:
        G, Gex, Jex = rates
    g = params.gamma
    O = complex(params.Omega_c)
    Oc = O.conjugate()
    D = params.Delta_c + level_shift
    Gt = Gex + 1j * Jex  # Gamma_tilde = Gamma_ex + i J_ex
    Gtc = Gt.conjugate()

    def rhs(r):
        d = np.empty((4, 4), dtype=complex)
        d[0, 0] = (g + G) * (r[1, 1] + r[2, 2]) + Gex * (r[1, 2] + r[2, 1])
        d[1, 1] = (
            -(g + G) * r[1, 1] + g * r[3, 3]
            - Gt / 2 * r[2, 1] - Gtc / 2 * r[1, 2]
            + 1j * (O * r[1, 3] - Oc * r[3, 1])
        )
        d[2, 2] = (
            -(g + G) * r[2, 2] + g * r[3, 3]
            - Gt / 2 * r[1, 2] - Gtc / 2 * r[2, 1]
            + 1j * (O * r[2, 3] - Oc * r[3, 2])
        )
        d[0, 1] = (
            (1j * D - g / 2 - G / 2) * r[0, 1] + g * r[2, 3]
            - Gtc / 2 * r[0, 2] + 1j * O * r[0, 3]
        )
        d[1, 0] = (
            -(1j * D + g / 2 + G / 2) * r[1, 0] + g * r[3, 2]
            - Gt / 2 * r[2, 0] - 1j * Oc * r[3, 0]
        )
        d[0, 2] = (
            (1j * D - g / 2 - G / 2) * r[0, 2] + g * r[1, 3]
            - Gtc / 2 * r[0, 1] + 1j * O * r[0, 3]
        )
        d[2, 0] = (
            -(1j * D + g / 2 + G / 2) * r[2, 0] + g * r[3, 1]
            - Gt / 2 * r[1, 0] - 1j * Oc * r[3, 0]
        )
        d[0, 3] = -g * r[0, 3] + 1j * Oc * (r[0, 1] + r[0, 2])
        d[3, 0] = -g * r[3, 0] - 1j * O * (r[1, 0] + r[2, 0])
        d[1, 2] = (
            -(g + G) * r[1, 2] - Gt / 2 * r[2, 2] - Gtc / 2 * r[1, 1]
            + 1j * (O * r[1, 3] - Oc * r[3, 2])
        )
        d[2, 1] = (
            -(g + G) * r[2, 1] - Gtc / 2 * r[2, 2] - Gt / 2 * r[1, 1]
            - 1j * (Oc * r[3, 1] - O * r[2, 3])
        )
        d[1, 3] = (
            -(1j * D + 3 * g / 2 + G / 2) * r[1, 3] - Gt / 2 * r[2, 3]
            + 1j * Oc * (r[1, 1] + r[1, 2] - r[3, 3])
        )
        d[3, 1] = (
            (1j * D - 3 * g / 2 - G / 2) * r[3, 1] - Gtc / 2 * r[3, 2]
            - 1j * O * (r[1, 1] + r[2, 1] - r[3, 3])
        )
        d[2, 3] = (
            -(1j * D + 3 * g / 2 + G / 2) * r[2, 3] - Gt / 2 * r[1, 3]
            + 1j * Oc * (r[2, 1] + r[2, 2] - r[3, 3])
        )
        d[3, 2] = (
            (1j * D - 3 * g / 2 - G / 2) * r[3, 2] - Gtc / 2 * r[3, 1]
            - 1j * O * (r[1, 2] + r[2, 2] - r[3, 3])
        )
        d[3, 3] = -(d[0, 0] + d[1, 1] + d[2, 2])  # trace constraint
        return d

    return rhs


def pair_rhs_reference(params, rho):
    """Unoptimised operator-form RHS used in tests; mirrors pair_rhs."""
    m = as_matrix(rho)
    h = atomic_hamiltonian(params)
    ex = exchange_rates(params)
    out = -1j * (h @ m - m @ h)
    for op in (SIGMA_M_ATOM1, SIGMA_M_ATOM2):
        out = out + params.gamma * lindblad_dissipator(op, m)
    for op in (SIGMA_M1, SIGMA_M2):
        out = out + params.Gamma * lindblad_dissipator(op, m)
    c = cross_dissipator(SIGMA_M1, SIGMA_M2, m)
    out = out + ex.Gamma_ex * (c + dagger(c))
    return out


BASIS = PAIR_BASIS
