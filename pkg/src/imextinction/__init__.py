"""BB84 key-rate analysis for intensity modulators with finite extinction ratio."""

from .errors import (
    CutoffTooSmallError,
    DomainError,
    NoiseFloorError,
    NoRootError,
    NotPositiveAtOriginError,
)
from .qmath import PolarizationDensityMatrix, binary_entropy, mix, trace_distance
from .state_model import (
    ExtinctionModel,
    PulseParams,
    extinction_from_db,
    extinction_from_ratio,
    invert_qber,
    modified_qber,
    signal_state,
)
from .keyrate import (
    ChannelProfile,
    DecoyObservables,
    decoy_observables,
    decoy_rate,
    decoy_rate_modified,
    eta_of_distance,
    gllp_rate,
    modified_single_photon_rate,
    truncated_gain_check,
)
from .analysis import (
    RatePoint,
    SweepSpec,
    SweepVariable,
    channel_comparison,
    max_distance,
    max_tolerable_qber,
    sweep,
)

__version__ = "0.1.0"
