import math

import numpy as np
import pytest

from rydgiant.core import DensityMatrix, dagger, matrix_unit
from rydgiant.pair import (
    PairParams,
    atomic_hamiltonian,
    exchange_rates,
    expanded_rhs,
    expanded_rhs_fn,
    pair_rhs,
    pair_rhs_fn,
    pair_rhs_reference,
)

from conftest import random_density

PI = math.pi


def params(**kw):
    base = dict(gamma=0.001, Gamma=1.0, Omega_c=1.0, Delta_c=30.0,
                phi=40.0 * PI, V6=2.0e4)
    base.update(kw)
    return PairParams(**base)


class TestExchangeRates:
    def test_even_pi_multiple(self):
        ex = exchange_rates(params(phi=40.0 * PI))
        assert abs(ex.J_ex) < 1e-12
        assert abs(ex.Gamma_ex - 1.0) < 1e-12

    def test_odd_pi_multiple(self):
        ex = exchange_rates(params(phi=41.0 * PI))
        assert abs(ex.J_ex) < 1e-12
        assert abs(ex.Gamma_ex + 1.0) < 1e-12

    def test_quadrature(self):
        ex = exchange_rates(params(phi=40.5 * PI))
        assert abs(ex.J_ex - 1.0) < 1e-12
        assert abs(ex.Gamma_ex) < 1e-12

    def test_sum_of_squares_invariant(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            g = rng.uniform(0.1, 3.0)
            p = params(Gamma=g, phi=rng.uniform(0.0, 50.0 * PI))
            ex = exchange_rates(p)
            assert abs(ex.J_ex**2 + ex.Gamma_ex**2 - g**2) < 1e-12


class TestAtomicHamiltonian:
    def test_detuning_only(self):
        h = atomic_hamiltonian(params(Omega_c=0.0, phi=40.0 * PI))
        assert np.allclose(h, np.diag([0.0, 30.0, 30.0, 0.0]), atol=1e-12)

    def test_drive_only(self):
        h = atomic_hamiltonian(params(Omega_c=1.0, Delta_c=0.0, phi=40.0 * PI,
                                      V6=0.0))
        expected = np.zeros((4, 4), dtype=complex)
        expected[3, 1] = expected[3, 2] = 1.0
        expected[1, 3] = expected[2, 3] = 1.0
        assert np.allclose(h, expected, atol=1e-12)

    def test_exchange_block(self):
        h = atomic_hamiltonian(params(Omega_c=0.0, Delta_c=0.0, phi=40.5 * PI,
                                      V6=0.0))
        block = h[1:3, 1:3]
        assert np.allclose(block, [[0.0, 0.5], [0.5, 0.0]], atol=1e-12)

    def test_hermitian(self):
        h = atomic_hamiltonian(params(Omega_c=0.3 + 0.7j, phi=12.3))
        assert np.max(np.abs(h - dagger(h))) < 1e-15


class TestPairRhs:
    def test_ground_stationary_without_drive(self):
        p = params(Omega_c=0.0)
        out = pair_rhs(p, DensityMatrix.ground())
        assert np.max(np.abs(out)) < 1e-15

    def test_double_excited_intrinsic_decay_only(self):
        p = params(Omega_c=0.0)
        out = pair_rhs(p, DensityMatrix.double_excited())
        assert abs(out[3, 3] - (-2 * p.gamma)) < 1e-15
        assert abs(out[1, 1] - p.gamma) < 1e-15
        assert abs(out[2, 2] - p.gamma) < 1e-15
        assert abs(out[0, 0]) < 1e-15

    def test_matches_expanded_on_random_state(self):
        rng = np.random.default_rng(1)
        p = params()
        rho = random_density(rng)
        assert np.max(np.abs(pair_rhs(p, rho) - expanded_rhs(p, rho))) < 1e-12

    def test_rejects_invalid_state(self):
        p = params()
        with pytest.raises(ValueError, match="invalid pair state"):
            pair_rhs(p, np.eye(4))  # trace 4
        with pytest.raises(ValueError, match="invalid pair state"):
            bad = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
            bad[0, 1] = 1e-3  # non-Hermitian
            pair_rhs(p, bad)


class TestExpandedRhs:
    def test_single_coherence_row(self):
        p = params()
        c = 0.37 - 0.11j
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0  # unit trace carrier, does not feed d rho_01
        rho[0, 1] = c
        rho[1, 0] = np.conj(c)
        out = expanded_rhs(p, rho)
        expected = (1j * p.Delta_c - p.gamma / 2 - p.Gamma / 2) * c
        assert abs(out[0, 1] - expected) < 1e-14

    def test_maximally_mixed_no_intrinsic(self):
        p = params(gamma=0.0, Omega_c=0.0, phi=40.0 * PI)
        out = expanded_rhs(p, DensityMatrix.maximally_mixed())
        ex = exchange_rates(p)
        expected = np.zeros((4, 4), dtype=complex)
        expected[0, 0] = p.Gamma / 2.0
        expected[1, 1] = expected[2, 2] = -p.Gamma / 4.0
        expected[1, 2] = expected[2, 1] = -ex.Gamma_ex / 4.0
        assert np.allclose(out, expected, atol=1e-14)

    def test_matches_operator_route_examples(self):
        for p in (params(Omega_c=0.0), params()):
            for dm in (DensityMatrix.ground(), DensityMatrix.double_excited()):
                a = pair_rhs(p, dm)
                b = expanded_rhs(p, dm)
                assert np.max(np.abs(a - b)) < 1e-14


class TestDualRouteOracle:
    def test_equivalence_over_random_states_and_params(self):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(20):
            p = PairParams(
                gamma=rng.uniform(0.0, 0.2),
                Gamma=rng.uniform(0.05, 3.0),
                Omega_c=complex(rng.normal(), rng.normal()),
                Delta_c=rng.uniform(-60.0, 60.0) or 1.0,
                phi=rng.uniform(0.0, 50.0 * PI),
            )
            fast = pair_rhs_fn(p)
            scalar = expanded_rhs_fn(p)
            for _ in range(50):
                rho = random_density(rng)
                d = np.max(np.abs(fast(rho) - scalar(rho)))
                worst = max(worst, float(d))
                d2 = np.max(np.abs(fast(rho) - pair_rhs_reference(p, rho)))
                worst = max(worst, float(d2))
        assert worst < 1e-12, f"dual-route deviation {worst}"

    def test_trace_and_hermiticity_preserved(self):
        rng = np.random.default_rng(43)
        p = params(Omega_c=0.8 - 0.2j, phi=17.77)
        fast = pair_rhs_fn(p)
        for _ in range(100):
            rho = random_density(rng)
            out = fast(rho)
            assert abs(np.trace(out)) < 1e-12
            assert np.max(np.abs(out - dagger(out))) < 1e-12


def test_dissipation_matrix_positive_semidefinite():
    # the guided two-channel rate matrix [[G, Gex], [Gex, G]] stays PSD
    for mphi in np.linspace(0.0, 50.0, 401):
        p = params(phi=mphi * PI)
        ex = exchange_rates(p)
        mat = np.array([[p.Gamma, ex.Gamma_ex], [ex.Gamma_ex, p.Gamma]])
        assert np.linalg.eigvalsh(mat)[0] >= -1e-15


@pytest.mark.xfail(
    strict=True,
    reason="exact quadrature-phase equivalence holds only for the eliminated "
    "giant-atom model; in the full pair model the J_ex = +-Gamma exchange "
    "shifts the bright single-excitation state by +-Gamma/2, changing the "
    "two-photon decay denominator (Delta_c +- Gamma/2)^2 and the Rabi "
    "frequency, so the trajectories differ at the 1e-2 level (see "
    "acceptance criterion 4 analysis)",
)
def test_quadrature_phase_population_symmetry(fig2b_trajectories):
    a = fig2b_trajectories[40.5].columns["rr"]
    b = fig2b_trajectories[39.5].columns["rr"]
    assert np.max(np.abs(a - b)) < 1e-8


def test_params_validation():
    with pytest.raises(ValueError, match="gamma"):
        PairParams(gamma=-1.0)
    with pytest.raises(ValueError, match="Gamma"):
        PairParams(Gamma=-0.5)
    with pytest.warns(UserWarning, match="V6"):
        PairParams(Delta_c=5000.0, V6=2.0e4)


def test_atom_local_intrinsic_channel_feeds_coherences():
    # gamma couples the rr--single coherence into the single--ground one;
    # this is the cross-transition term of the per-atom jump operator
    p = params(Gamma=0.0, Omega_c=0.0, Delta_c=0.0, V6=0.0)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0
    rho[2, 3] = rho[3, 2] = 0.25
    out = pair_rhs_fn(p)(rho)
    assert abs(out[0, 1] - p.gamma * 0.25) < 1e-15
    assert abs(expanded_rhs_fn(p)(rho)[0, 1] - p.gamma * 0.25) < 1e-15


def test_matrix_unit_convention():
    assert matrix_unit(1, 0)[1, 0] == 1.0
    assert np.count_nonzero(matrix_unit(1, 0)) == 1
