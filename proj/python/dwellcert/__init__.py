"""Dwell-time stability certificates for switched linear systems."""

from ._dwellcert import (
    DwellcertError,
    System,
    __version__,
    diagonal_case,
    expm,
    real_jordan,
    run_cli,
    simple_loops,
    smallest_singular_value,
    spectral_norm,
    standard_decomposition,
)

__all__ = [
    "DwellcertError",
    "System",
    "__version__",
    "diagonal_case",
    "expm",
    "real_jordan",
    "run_cli",
    "simple_loops",
    "smallest_singular_value",
    "spectral_norm",
    "standard_decomposition",
]
