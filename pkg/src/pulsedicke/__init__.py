"""Pulsed-drive simulator for the finite-N Dicke model."""

from .errors import (
    ConfigError,
    DimensionCapError,
    PositivityError,
    PulseDickeError,
    StiffnessError,
    TruncationLeakError,
)
from .model import (
    BasisDescriptor,
    DickeParams,
    PulseSchedule,
    build_basis,
    coherent_state,
    ground_state,
    hamiltonian,
    operators,
    parity_operator,
    product_state,
    pulse_value,
)
from .integrate import (
    IntegratorControl,
    Trajectory,
    fidelity,
    initial_state,
    propagate,
    snapshot_times,
)
from .observables import (
    entanglement_entropy,
    expectation,
    negativity,
    reduce,
    von_neumann_entropy,
)
from .states import DensityMatrix, PureState

__version__ = "0.1.0"
