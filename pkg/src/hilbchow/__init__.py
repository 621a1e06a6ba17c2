"""Exact rational Chow-ring models of Hilbert schemes of two and three points."""

from .poly import Generator, Polynomial, StructureError
from .graded import (
    GradedLinearMap,
    GradedSubspace,
    GroupAction,
    NotAHomomorphism,
    RingPresentation,
    image_kernel,
    induced_map,
    invariant_subspace,
    preimage,
    subalgebra_closure,
    symmetrize,
)

__version__ = "0.1.0"
