"""Cyclic Jacobi eigenvalue method for symmetric matrices under parallel
pivot strategies, with an empirical verification harness for its
convergence identities and slow-convergence constructions."""

from .core import SymMatrix, SignedPermutation, conjugate_signed_perm, off_norm, q_rotation
from .kernel import apply_jacobi_step, apply_parallel_step, jacobi_angle, solve, sweep, t_iterate, t_operator
from .scalar import Precision, context
from .strategy import PivotOrdering, PivotPair, enumerate_parallel_orderings, ordering_i1, ordering_i2

__version__ = "0.1.0"

__all__ = [
    "SymMatrix", "SignedPermutation", "conjugate_signed_perm", "off_norm",
    "q_rotation", "apply_jacobi_step", "apply_parallel_step", "jacobi_angle",
    "solve", "sweep", "t_iterate", "t_operator", "Precision", "context",
    "PivotOrdering", "PivotPair", "enumerate_parallel_orderings",
    "ordering_i1", "ordering_i2", "__version__",
]
