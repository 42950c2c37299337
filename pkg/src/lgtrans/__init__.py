"""Transitions of a trapped atom driven by a Laguerre-Gaussian beam.

The beam's orbital angular momentum is shared between the electronic and
centre-of-mass motion. Submodules:

* ``specfun``: Laguerre polynomials, spherical harmonics and Bessel
  functions, hypergeometric series
* ``harmonics``: solid harmonics, their translation theorem, the near-axis field
* ``angular``: 3j symbols and integrals of harmonic products
* ``model``: atom, beam and state types
* ``transitions``: channels, selection rules, matrix elements, CM probabilities
* ``oracle``: brute-force cross-checks
* ``cli``: the ``lgtrans`` command
"""

from .errors import DomainError, NumericError
from .model import AtomSpec, BeamConfig, CMState, ElectronicState
from .transitions import (
    TransitionChannel,
    TransitionResult,
    cm_probability,
    cm_spectrum,
    conservation_check,
    enumerate_channels,
    matrix_element,
    scan,
    selection_table,
)

__all__ = [
    "DomainError",
    "NumericError",
    "AtomSpec",
    "BeamConfig",
    "CMState",
    "ElectronicState",
    "TransitionChannel",
    "TransitionResult",
    "cm_probability",
    "cm_spectrum",
    "conservation_check",
    "enumerate_channels",
    "matrix_element",
    "scan",
    "selection_table",
]
