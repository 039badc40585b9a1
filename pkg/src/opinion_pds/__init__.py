"""Budgeted multi-topic opinion dynamics.

A library and command line tool that simulates opinion formation among agents
who allocate a limited budget across several topics. Opinions evolve as a
projected dynamical system on the product of per-agent budget polytopes.

This package provides:
- the model quantities (utility, vector field, Jacobian, potential)
- Euclidean, weighted and tangent-cone projections onto budget polytopes
- a projected integrator with Lyapunov and residual monitoring
- equilibrium computation with variational-inequality and Nash certificates
- structural tests on the influence network and the budget-exhaustion lemmas
"""

# Dynamic version from setuptools_scm
try:
    from ._version import version as __version__
except ImportError:
    __version__ = "unknown"
__license__ = "Apache-2.0"
__description__ = (
    "Multi-topic opinion dynamics under per-agent budget constraints "
    "as a projected dynamical system"
)

__all__ = [
    "__description__",
    "__license__",
    "__version__",
]
