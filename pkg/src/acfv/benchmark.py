"""Built-in benchmark scenario with frozen reference outputs.

A fixed driving path on the quarter grid of [0, 1], the 2 x 2 mesh and
amplitude 10 give a deterministic scenario whose outputs are known to
eight digits.  Three tables are produced: the splitting method with two
steps, the plain heat flow with two steps, and the splitting method
with four steps.  They double as a regression gate: any change in mesh
ordering, assembly, the solver or the resolvent shows up as a deviation
far above the comparison threshold.

The driving increments ship as a CSV data file and are injected through
the normal increment-loading path, exercising the same file format
users inject their own paths with.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .assembly import assemble_mass, assemble_stiffness
from .linalg import ShiftedSolver
from .mesh import build_uniform_mesh, default_initial_state
from .scheme import EpsilonSchedule, SchemeParams, run_trajectory
from .stochastic import aggregate_increments, load_increments

__all__ = [
    "QUARTER_INCREMENTS",
    "INITIAL_STATE_L2",
    "SPLITTING_N2",
    "HEAT_N2",
    "SPLITTING_N4",
    "CELLS_PER_AXIS",
    "AMPLITUDE",
    "HORIZON",
    "EPS_SCHEDULE",
    "TABLE_TOLERANCE",
    "increments_file",
    "run_benchmark_tables",
    "BenchmarkReport",
]

# Driving path: four quarter-interval Brownian increments.
QUARTER_INCREMENTS = (
    -0.6046086559049673,
    0.6937104821525855,
    -1.1713571186231886,
    0.24606633895637547,
)

# Scenario parameters.
CELLS_PER_AXIS = 2
AMPLITUDE = 10.0
HORIZON = 1.0
EPS_SCHEDULE = EpsilonSchedule.power(0.1, 1.0 / 3.0)

# Reference outputs, frozen to the eight digits they are known to.
INITIAL_STATE_L2 = (0.20088542, 0.05244792, 0.72953125, 0.19046875)

SPLITTING_N2 = (
    (0.39495382, 0.24383317, 0.64814013, 0.38692093),
    (-0.23254276, -0.21628772, -0.21627557, -0.23198247),
)
HEAT_N2 = (
    (0.39495382, 0.24383317, 0.64814013, 0.38692093),
    (-1.69747036, -1.57881501, -1.57872628, -1.69338044),
)
SPLITTING_N4 = (
    (-0.13385192, -0.07727270, -0.10617873, -0.13010620),
    (-0.02478902, -0.01854758, -0.02242615, -0.02428642),
    (-0.00476855, -0.00406696, -0.00458739, -0.00470111),
    (-0.00093698, -0.00085652, -0.00092635, -0.00092793),
)

# Acceptance threshold on the largest absolute deviation over all rows.
TABLE_TOLERANCE = 1e-5


def increments_file():
    """Path of the packaged CSV with the benchmark driving increments."""
    return resources.files("acfv").joinpath("data/quarter_increments.csv")


@dataclass
class BenchmarkReport:
    """Computed benchmark tables next to their frozen references."""

    tables: dict          # name -> list of computed state arrays
    expected: dict        # name -> tuple of reference rows
    max_deviation: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= TABLE_TOLERANCE


def run_benchmark_tables(path_file=None) -> BenchmarkReport:
    """Run the three benchmark tables and compare against the references.

    ``path_file`` may point at a CSV with four increments; by default
    the packaged ones are used.  The same fine path drives both step
    counts: the two-step run uses pairwise sums of the four increments.
    """
    if path_file is None:
        with resources.as_file(increments_file()) as p:
            fine = load_increments(p)
    else:
        fine = load_increments(path_file)
    if fine.shape != (4,):
        raise ValueError(f"benchmark driving path must have 4 increments, got {fine.shape[0]}")

    mesh = build_uniform_mesh(CELLS_PER_AXIS)
    u0 = default_initial_state(mesh)
    mass = assemble_mass(mesh)
    stiffness = assemble_stiffness(mesh)

    runs = {
        "splitting_n2": ("splitting", 2, SPLITTING_N2),
        "heat_n2": ("heat", 2, HEAT_N2),
        "splitting_n4": ("splitting", 4, SPLITTING_N4),
    }
    tables, expected = {}, {}
    max_dev = 0.0
    for name, (variant, n_steps, reference) in runs.items():
        params = SchemeParams(horizon=HORIZON, n_steps=n_steps,
                              epsilon=EPS_SCHEDULE, amplitude=AMPLITUDE,
                              variant=variant)
        solver = ShiftedSolver(mass, stiffness, params.tau)
        inc = aggregate_increments(fine, n_steps)
        traj = run_trajectory(u0, inc, params, solver, keep_history=True)
        tables[name] = traj.states
        expected[name] = reference
        dev = max(float(np.max(np.abs(state - np.asarray(ref))))
                  for state, ref in zip(traj.states, reference))
        max_dev = max(max_dev, dev)
    return BenchmarkReport(tables=tables, expected=expected, max_deviation=max_dev)
