"""Exit-time moment spectra of Riemannian domains.

Radial and grid solvers for the Poisson hierarchy, the moment/Dirichlet
spectrum dictionary, and comparison checks against symmetrized caps.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
