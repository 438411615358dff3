"""Dense complex-matrix primitives shared by every model.

Everything here operates on plain ``numpy`` complex arrays.  The two-atom
basis ordering is fixed globally as::

    0: |g1 g2>    1: |r1 g2>    2: |g1 r2>    3: |r1 r2>

i.e. atom 1 is the fast index.  The giant-atom basis is {|g>, |r>}.
All values are treated as immutable after construction; nothing in this
module mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PAIR_BASIS = ("gg", "r1g2", "g1r2", "rr")
GIANT_BASIS = ("g", "r")

# Eigenvalues of rho*rho_tilde below this (unit-trace scale) are treated as
# exact zeros; the QR eigensolver's backward error is ~1e-15 on dim <= 16.
EIG_ZERO_TOL = 1e-12


def matrix_unit(i, j, dim=4):
    """|i><j| in a ``dim``-dimensional space."""
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def dagger(m):
    return np.asarray(m).conj().T


def commutator(a, b):
    return a @ b - b @ a


def anticommutator(a, b):
    return a @ b + b @ a


# Raising operators of the two-atom four-level scheme (lower transitions
# through the waveguide, upper transitions through the drive).
SIGMA_P1 = matrix_unit(1, 0)  # |r1g2><g1g2|
SIGMA_P2 = matrix_unit(2, 0)  # |g1r2><g1g2|
SIGMA_P3 = matrix_unit(3, 1)  # |r1r2><r1g2|
SIGMA_P4 = matrix_unit(3, 2)  # |r1r2><g1r2|
SIGMA_M1 = dagger(SIGMA_P1)
SIGMA_M2 = dagger(SIGMA_P2)
SIGMA_M3 = dagger(SIGMA_P3)
SIGMA_M4 = dagger(SIGMA_P4)

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
# sigma_y (x) sigma_y in the fixed product basis; symmetric in the two atoms,
# so the atom-ordering convention does not matter here.
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)

# Giant-atom two-level operators, basis {|g>, |r>}.
GIANT_SIGMA_M = matrix_unit(0, 1, dim=2)
GIANT_SIGMA_P = matrix_unit(1, 0, dim=2)


def _check_square(m, name="matrix"):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def lindblad_dissipator(op, rho):
    """L[O]rho = O rho O+ - {O+O, rho}/2.  Traceless for any O, rho."""
    op = _check_square(op, "op")
    rho = _check_square(rho, "rho")
    if op.shape != rho.shape:
        raise ValueError(f"dimension mismatch: op {op.shape} vs rho {rho.shape}")
    odo = dagger(op) @ op
    return op @ rho @ dagger(op) - 0.5 * (odo @ rho + rho @ odo)


def cross_dissipator(a, b, rho):
    """Non-Hermitian half of a cross decay term: A rho B+ - {B+A, rho}/2.

    The caller adds the Hermitian conjugate (the ``+ H.c.`` of the master
    equation).  With a == b this reduces to ``lindblad_dissipator``.
    """
    a = _check_square(a, "a")
    b = _check_square(b, "b")
    rho = _check_square(rho, "rho")
    if not (a.shape == b.shape == rho.shape):
        raise ValueError(
            f"dimension mismatch: a {a.shape}, b {b.shape}, rho {rho.shape}"
        )
    bda = dagger(b) @ a
    return a @ rho @ dagger(b) - 0.5 * (bda @ rho + rho @ bda)


def partial_trace(rho, keep):
    """Reduced 2x2 state of atom ``keep`` (1 or 2) from a two-qubit rho.

    Accepts a plain 4x4 array or a DensityMatrix; returns the same kind.
    """
    wrap = isinstance(rho, DensityMatrix)
    m = rho.matrix if wrap else np.asarray(rho, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"partial_trace needs a 4x4 state, got {m.shape}")
    if keep not in (1, 2):
        raise ValueError(f"keep must be atom index 1 or 2, got {keep!r}")
    # basis index = (atom1 excited) + 2*(atom2 excited)
    t = m.reshape(2, 2, 2, 2)  # [a2, a1, b2, b1]
    red = np.einsum("abcb->ac", t) if keep == 2 else np.einsum("abac->bc", t)
    return DensityMatrix(red, GIANT_BASIS) if wrap else red


def eigenvalues(m, context="matrix"):
    """All eigenvalues of a square matrix (dim <= 16), Hermitian fast path."""
    m = _check_square(m)
    if m.shape[0] > 16:
        raise ValueError(f"eigenvalues limited to dim <= 16, got {m.shape[0]}")
    try:
        if np.allclose(m, dagger(m), atol=1e-12, rtol=0.0):
            return np.linalg.eigvalsh(m).astype(complex)
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigenvalue solver failed on {context}") from exc


@dataclass(frozen=True)
class DensityMatrix:
    """A density operator over a fixed, labelled basis.

    Validity (unit trace, Hermiticity, positivity) is checked by explicit
    methods rather than enforced at construction, so that integrator drift
    can be monitored instead of aborting a run.
    """

    matrix: np.ndarray
    basis_labels: tuple = PAIR_BASIS

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))
        if m.shape != (self.dim, self.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match "
                f"{self.dim} basis labels"
            )

    @property
    def dim(self):
        return len(self.basis_labels)

    def trace_error(self):
        return abs(np.trace(self.matrix) - 1.0)

    def hermiticity_error(self):
        return float(np.max(np.abs(self.matrix - dagger(self.matrix))))

    def min_eigenvalue(self):
        herm = 0.5 * (self.matrix + dagger(self.matrix))
        return float(np.linalg.eigvalsh(herm)[0])

    def violations(self, trace_tol=1e-9, herm_tol=1e-12, eig_tol=1e-9):
        """List of human-readable invariant violations (empty if valid)."""
        out = []
        if self.trace_error() > trace_tol:
            out.append(f"trace deviates from 1 by {self.trace_error():.3e}")
        if self.hermiticity_error() > herm_tol:
            out.append(f"Hermiticity violated by {self.hermiticity_error():.3e}")
        if self.min_eigenvalue() < -eig_tol:
            out.append(f"negative eigenvalue {self.min_eigenvalue():.3e}")
        return out

    def is_valid(self, trace_tol=1e-9, herm_tol=1e-12, eig_tol=1e-9):
        return not self.violations(trace_tol, herm_tol, eig_tol)

    def population(self, label):
        i = self.basis_labels.index(label)
        return float(self.matrix[i, i].real)

    @staticmethod
    def from_pure(vec, basis_labels=PAIR_BASIS):
        v = np.asarray(vec, dtype=complex)
        v = v / np.linalg.norm(v)
        return DensityMatrix(np.outer(v, v.conj()), basis_labels)

    @staticmethod
    def ground(dim=4):
        labels = PAIR_BASIS if dim == 4 else GIANT_BASIS
        m = np.zeros((dim, dim), dtype=complex)
        m[0, 0] = 1.0
        return DensityMatrix(m, labels)

    @staticmethod
    def double_excited(dim=4):
        labels = PAIR_BASIS if dim == 4 else GIANT_BASIS
        m = np.zeros((dim, dim), dtype=complex)
        m[-1, -1] = 1.0
        return DensityMatrix(m, labels)

    @staticmethod
    def plus_state():
        return DensityMatrix.from_pure([0.0, 1.0, 1.0, 0.0])

    @staticmethod
    def minus_state():
        return DensityMatrix.from_pure([0.0, 1.0, -1.0, 0.0])

    @staticmethod
    def maximally_mixed(dim=4):
        labels = PAIR_BASIS if dim == 4 else GIANT_BASIS
        return DensityMatrix(np.eye(dim, dtype=complex) / dim, labels)


def as_matrix(state):
    """Plain complex ndarray view of a DensityMatrix or array-like."""
    if isinstance(state, DensityMatrix):
        return state.matrix
    return np.asarray(state, dtype=complex)
