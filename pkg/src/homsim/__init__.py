"""Two-photon interference on beam splitters and Mach-Zehnder interferometers.

Three engines evaluate the same circuits side by side:

* :mod:`homsim.wave` -- classical coherence optics and random-phase ensembles
* :mod:`homsim.fock` -- occupation-number states and creation-operator algebra
* :mod:`homsim.phase_basis` -- superposed phase-basis beam-splitter matrices
"""
from .numerics import (
    BasisSign,
    Convention,
    ElementMatrix,
    FieldVector,
    apply,
    bs_matrix,
    compose,
    equal_up_to_global_phase,
    intensities,
    phase_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BasisSign",
    "Convention",
    "ElementMatrix",
    "FieldVector",
    "apply",
    "bs_matrix",
    "compose",
    "equal_up_to_global_phase",
    "intensities",
    "phase_matrix",
]
