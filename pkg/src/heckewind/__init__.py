"""Hecke orbits of winding elements in weight-2k modular symbols, with analytic cross-checks."""

__version__ = "0.1.0"

from .linalg import InvalidModulusError  # noqa: E402
from .manin import ResourceLimitError, SymbolSpace, build_space, dimension_cusp_forms  # noqa: E402
from .geometry import Cusp, PathSymbol, path_to_coords, winding_vector  # noqa: E402
from .hecke import hecke_apply, hecke_apply_cosets, hecke_matrix  # noqa: E402
from .algebra import equivalence_report, winding_orbit, winding_orbit_rank  # noqa: E402
from .experiments import (  # noqa: E402
    independence_certificate,
    parse_symbol_expression,
    render_symbol_expression,
    scan_primes,
    verify_certificate,
)
