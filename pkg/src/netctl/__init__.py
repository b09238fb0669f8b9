"""Control energy and control chains of directed complex networks."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConsistencyError,
    DimensionError,
    DomainError,
    InsufficientDataError,
    NetctlError,
    NumericOverflowError,
    ParameterError,
    ParseError,
    UncontrollableError,
    ValidationError,
)
from .graph import (  # noqa: E402
    DegreeModel,
    DirectedNetwork,
    analytic_degree_pdf,
    generate_ba,
    generate_er,
    load_edge_list,
)
from .matching import ControlMatrix, MatchingResult, control_matrix, maximum_matching  # noqa: E402
from .chains import ChainProfile, control_profile, topological_diameter  # noqa: E402
from .linctrl import (  # noqa: E402
    ControlOutcome,
    ControlProblem,
    chain_energy,
    condition_number,
    gramian,
    matrix_exponential,
    minimum_energy,
    oracle_energy,
    simulate_control,
)
from .kernels import BACKEND  # noqa: E402
