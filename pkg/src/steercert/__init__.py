"""Certification toolkit for steering assemblages with inputs on the trusted side.

The package builds and checks assemblages for scenarios where the trusted
party also receives an input (input/output boxes on one wing, a quantum state
on the other), decides membership in the no-signalling, local-hidden-state,
and moment-matrix-relaxation sets with an in-house semidefinite solver, and
extracts quantum realizations or post-quantum certificates.
"""

from steercert import assemblages, cli, ghjw, matcore, ptp, sdp, serialize, steering

__all__ = [
    "assemblages",
    "cli",
    "ghjw",
    "matcore",
    "ptp",
    "sdp",
    "serialize",
    "steering",
]

__version__ = "0.1.0"
