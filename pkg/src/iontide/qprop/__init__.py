"""Split-operator wavepacket propagation on a 1-D grid."""

from .analysis import (
    Moments,
    energy,
    fock_amplitudes,
    fock_distribution,
    fock_overlap,
    kinetic_energy,
    moments,
    momentum_moments,
    position_moments,
    potential_energy,
)
from .fidelity import DEFAULT_THRESHOLD, FidelityTrace, harmonic_reference_fidelity
from .grid import (
    GeometryError,
    GridError,
    GridSpec,
    NumericalInstabilityError,
    OscillatorUnits,
    ResolutionError,
    Wavefunction,
    next_power_of_two,
)
from .io import (
    read_wavefunction_binary,
    read_wavefunction_csv,
    write_trace_csv,
    write_wavefunction_binary,
    write_wavefunction_csv,
)
from .propagator import (
    PropagationResult,
    SplitOperator,
    check_momentum_resolution,
    propagate,
    relax_ground_state,
    required_momentum,
)
from .states import make_coherent_state, make_ground_state, make_squeezed_state, momentum_kick, squeezing_quadratic
