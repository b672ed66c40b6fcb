"""Three-level Lambda atom in a single-mode cavity: amplitudes, entropy, populations."""
from .entanglement import (
    InvalidDensityError,
    JointState,
    TimeSeries,
    entropy_eigenvalues,
    entropy_series,
    populations,
    reduced_density,
    von_neumann_entropy,
)
from .model import ModelConfig, TruncationError, coherent_weights, coupling, mode_shape, scaled_time
from .solvers import (
    SolverChoice,
    cubic_roots_trig,
    integrate_sector,
    ode_rhs,
    solve_equal_detuning,
    solve_general,
    solve_resonant,
    solve_sector,
)

__version__ = "0.1.0"
