"""Dissipative dynamics of two driven Rydberg atoms on a photonic-crystal
waveguide, with a synthetic giant-atom effective model, entanglement and
photon-correlation observables, and continuous-coupling generalisations."""

__version__ = "0.1.0"

from .core import (
    DensityMatrix,
    GIANT_BASIS,
    PAIR_BASIS,
    cross_dissipator,
    eigenvalues,
    lindblad_dissipator,
    partial_trace,
)
from .pair import (
    ExchangeRates,
    PairParams,
    atomic_hamiltonian,
    exchange_rates,
    expanded_rhs,
    pair_rhs,
)
from .giant import (
    GiantParams,
    giant_params_from_pair,
    giant_population_analytic,
    giant_rhs,
    upsilon,
)
from .observables import (
    ObservableSet,
    concurrence,
    dressed_populations,
    dressed_rate_check,
    g2,
    observable_set,
)
from .continuous import (
    CouplingRates,
    QuadratureError,
    continuous_pair_rhs,
    continuous_rates,
    quadrature_rates,
    upsilon_continuous,
)
from .integrate import (
    IntegrationError,
    IntegratorConfig,
    TimeSeries,
    convergence_order,
    integrate,
)
from .geometry import (
    LabGeometry,
    coupling_width,
    phase_from_separation,
    projected_separation,
    vdw_shift,
)

__all__ = [
    "__version__",
    "DensityMatrix", "GIANT_BASIS", "PAIR_BASIS",
    "cross_dissipator", "eigenvalues", "lindblad_dissipator", "partial_trace",
    "ExchangeRates", "PairParams", "atomic_hamiltonian", "exchange_rates",
    "expanded_rhs", "pair_rhs",
    "GiantParams", "giant_params_from_pair", "giant_population_analytic",
    "giant_rhs", "upsilon",
    "ObservableSet", "concurrence", "dressed_populations",
    "dressed_rate_check", "g2", "observable_set",
    "CouplingRates", "QuadratureError", "continuous_pair_rhs",
    "continuous_rates", "quadrature_rates", "upsilon_continuous",
    "IntegrationError", "IntegratorConfig", "TimeSeries",
    "convergence_order", "integrate",
    "LabGeometry", "coupling_width", "phase_from_separation",
    "projected_separation", "vdw_shift",
]
