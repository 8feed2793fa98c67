"""Stochastic Schrodinger equation laboratory on truncated Fock spaces.

Trajectory unravelings of Lindblad master equations: the norm-preserving
nonlinear equation, its linear companion with Girsanov reweighting, a
master-equation reference solver, and numerical diagnostics for growth and
invariant-measure criteria.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
