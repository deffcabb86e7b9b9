"""Finite-volume lab for the stochastic heat flow constrained to [0, 1].

The package discretizes the noise-driven Allen-Cahn problem with a
two-point flux finite-volume method in space, implicit Euler with
Euler-Maruyama noise in time, and a piecewise-linear penalty in place
of the set-valued [0, 1] constraint.  The penalty term is handled
either by a cheap two-substep splitting (linear heat solve, then a
closed-form componentwise resolvent) or by a fully implicit semismooth
Newton step, and the package ships the Monte Carlo machinery to study
the difference: expectation drift, strong time-refinement errors, and
empirical convergence orders.
"""

from .assembly import assemble_mass, assemble_stiffness
from .constraint import psi_eps, resolvent, resolvent_field
from .errors import ConfigError, NumericalFailure
from .experiments import (ErrorCurve, ExpectationResult, StudyConfig,
                          convergence_study, estimate_error,
                          estimate_expectation, expectation_study,
                          fit_convergence_order, splitting_error_study)
from .linalg import ShiftedSolver
from .mesh import (Mesh, build_uniform_mesh, cell_average,
                   default_initial_state, export_mesh_csv,
                   squared_l2_distance)
from .scheme import (EpsilonSchedule, SchemeParams, Trajectory, coupled_step,
                     heat_step, run_trajectory, splitting_step)
from .stochastic import (NoisePath, aggregate_increments, diffusion_g,
                         dump_increments, load_increments, sample_path)

__version__ = "0.1.0"

__all__ = [
    "Mesh", "build_uniform_mesh", "cell_average", "default_initial_state",
    "squared_l2_distance", "export_mesh_csv",
    "assemble_mass", "assemble_stiffness",
    "ShiftedSolver",
    "psi_eps", "resolvent", "resolvent_field",
    "NoisePath", "sample_path", "aggregate_increments", "diffusion_g",
    "dump_increments", "load_increments",
    "EpsilonSchedule", "SchemeParams", "Trajectory",
    "splitting_step", "coupled_step", "heat_step", "run_trajectory",
    "StudyConfig", "ExpectationResult", "ErrorCurve",
    "estimate_expectation", "expectation_study", "estimate_error",
    "convergence_study", "fit_convergence_order", "splitting_error_study",
    "ConfigError", "NumericalFailure",
]
