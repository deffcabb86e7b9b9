"""The built-in benchmark scenario, step by step.

A fixed driving path (four quarter-interval Brownian increments, shipped
with the package) on the 2x2 mesh with amplitude 10 gives a fully
deterministic scenario.  Three runs show the behaviour of the scheme:

* two splitting steps: the first lands inside [0, 1], so the penalty is
  idle and the step equals plain heat flow; the second is pushed far
  below 0 by the noise and the resolvent pulls it back close to 0,
* two heat-flow steps (no penalty) for comparison: the second step ends
  near -1.7 instead,
* four splitting steps: after the first step every cell is below 0, and
  by one-sided trapping all later steps stay below 0, creeping up
  towards the threshold.

The values are compared against their frozen references; the run aborts
loudly if anything drifts.

Run:  python demos/02_benchmark_tables.py
"""

from acfv.benchmark import TABLE_TOLERANCE, run_benchmark_tables

report = run_benchmark_tables()

titles = {
    "splitting_n2": "splitting method, N=2",
    "heat_n2": "heat flow only, N=2",
    "splitting_n4": "splitting method, N=4",
}
for name, states in report.tables.items():
    print(titles[name])
    for n, state in enumerate(states, start=1):
        print(f"  n={n}: " + "  ".join(f"{v: .8f}" for v in state))
    print()

print(f"largest deviation from the reference tables: {report.max_deviation:.2e} "
      f"(tolerance {TABLE_TOLERANCE:g})")
assert report.passed
