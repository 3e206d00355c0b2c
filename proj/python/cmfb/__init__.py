"""Trajectory-level simulation of continuously measured quantum systems
under proportional-integral feedback.

The module mirrors the command-line interface: ``run`` and ``sweep`` accept
the same flat key=value config text (and ``--key=value`` override strings
without the dashes) and return the ensemble statistics and summary metrics
as plain dictionaries. The analytic references frozen into the C++ test
suite (``analytic_T0_steady``, ``oscillator_steady``) and the concurrence
measure are exposed for cross-checking from Python.
"""

from ._cmfb import (
    analytic_T0_steady,
    collective_to_computational,
    concurrence,
    oscillator_steady,
    run,
    sweep,
)

__all__ = [
    "analytic_T0_steady",
    "collective_to_computational",
    "concurrence",
    "oscillator_steady",
    "run",
    "sweep",
]
