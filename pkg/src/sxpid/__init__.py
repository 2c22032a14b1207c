"""Shared-exclusion partial information decomposition for discrete and continuous data."""
from .decomposition import SCHEMA_VERSION, PidDecomposition
from .discrete import (
    DiscreteJoint,
    discrete_gate,
    discrete_local_redundancy,
    discrete_pid,
    discrete_redundancy,
    load_pmf,
    save_pmf,
)
from .errors import (
    DegenerateColumnError,
    DegenerateGeometryWarning,
    IncompleteLatticeError,
    InsufficientSamplesError,
    LatticeMismatchError,
    StepTooLargeError,
    SxPIDError,
    UndefinedLocalValueError,
    UnsupportedOrderError,
)
from .gaussian import (
    GATES,
    DensityPoint,
    GateSpec,
    density_point,
    frechet_derivative,
    frechet_derivative_check,
    gaussian_mi,
    local_isx_continuous,
    make_gate,
    mc_redundancy,
    oracle_pid,
)
from .knn import (
    SampleSet,
    compute_epsilons,
    count_marginal,
    count_target,
    estimate_pid,
    estimate_redundancy,
    jitter,
)
from .lattice import (
    Antichain,
    RedundancyLattice,
    below,
    downset,
    enumerate_antichains,
    moebius_invert,
    redundancy_lattice,
    resum_atoms,
)
from .preprocessing import MODES, copula_transform, preprocess, standardize
from .special import digamma

__version__ = "0.1.0"
