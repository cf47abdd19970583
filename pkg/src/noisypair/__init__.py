"""Two qubits in independent structured vacuum reservoirs: exact dynamics,
concurrence evolution laws, and information-backflow diagnostics."""

from .decay import (
    ConvergenceWarning,
    CorrelationKernel,
    ReservoirParams,
    TimeGrid,
    correlation_lorentzian,
    correlation_zero,
    h_analytic,
    h_volterra,
)
from .dynamics import (
    ChannelPair,
    bell_phi,
    bell_psi,
    evolve,
    kraus_oracle,
    phi_asym,
    pure_to_state,
)
from .entanglement import (
    EsdReport,
    LawReport,
    NOEMixedState,
    concurrence,
    concurrence_pure,
    detect_esd,
    law_one_sided,
    law_two_sided_noe,
    law_two_sided_pure,
)
from .nonmarkov import (
    NonMarkovReport,
    evolve_qubit,
    measure_backflow,
    sigma_series,
    trace_distance,
)

__all__ = [
    "ChannelPair",
    "ConvergenceWarning",
    "CorrelationKernel",
    "EsdReport",
    "LawReport",
    "NOEMixedState",
    "NonMarkovReport",
    "ReservoirParams",
    "TimeGrid",
    "bell_phi",
    "bell_psi",
    "concurrence",
    "concurrence_pure",
    "correlation_lorentzian",
    "correlation_zero",
    "detect_esd",
    "evolve",
    "evolve_qubit",
    "h_analytic",
    "h_volterra",
    "kraus_oracle",
    "law_one_sided",
    "law_two_sided_noe",
    "law_two_sided_pure",
    "measure_backflow",
    "phi_asym",
    "pure_to_state",
    "sigma_series",
    "trace_distance",
]

__version__ = "0.1.0"
