"""Exact and numerical computations in the quadratic Fock space.

Submodules:

* ``stepfn`` - complex step functions on measured cells
* ``fock_core`` - n-particle inner products and exponential vectors
* ``normal_order`` - symbolic normal ordering, used as an exact oracle
* ``factorization`` - scalar checks of factorization over disjoint regions
* ``gram`` - Gram matrices, PSD tests and linear independence
* ``cli`` - the ``qfock`` command
"""

from . import factorization, fock_core, gram, normal_order, stepfn
from .numbers import QQi

__version__ = "0.1.0"

__all__ = ["QQi", "factorization", "fock_core", "gram", "normal_order", "stepfn"]
