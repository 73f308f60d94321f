"""memwave: desk-scale numerical laboratory for blow-up in damped wave equations
with a weakly singular memory nonlinearity.

Subpackage map:

* :mod:`memwave.exponents`   critical exponents and regime classification
* :mod:`memwave.fractional`  Riemann-Liouville operators and weighted integral estimates
* :mod:`memwave.specfun`     modified Bessel kernel, eigenfunction, auxiliary profile
* :mod:`memwave.kato`        iteration frames and blow-up certificates
* :mod:`memwave.solver`      radial finite-difference solver with memory forcing
* :mod:`memwave.testfn`      test-function diagnostics and weak-form residuals
* :mod:`memwave.config`      run configuration parsing
* :mod:`memwave.reporting`   deterministic CSV/SVG emission and run persistence
* :mod:`memwave.cli`         command line entry point
"""

from .errors import (
    CertificateError,
    ConfigError,
    DataError,
    DomainError,
    IntegrityError,
    MemwaveError,
)
from .exponents import ModelParams

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "MemwaveError",
    "DomainError",
    "DataError",
    "ConfigError",
    "IntegrityError",
    "CertificateError",
    "__version__",
]
