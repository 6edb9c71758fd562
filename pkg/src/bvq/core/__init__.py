"""Exact graded linear algebra over the rationals."""

from .complexes import (
    CohomologyReport,
    GradedComplex,
    GradedMap,
    GradedSpace,
    build_complex,
    certified_cohomology,
    check_chain_map,
    cohomology,
    cone,
    direct_sum,
    double_dual_iso,
    dual,
    shift,
    tensor,
)
from .linalg import backend_name, nullspace, rank
from .scalars import Poly, format_scalar, parse_scalar, to_rational

__all__ = [
    "CohomologyReport", "GradedComplex", "GradedMap", "GradedSpace", "Poly",
    "backend_name", "build_complex", "certified_cohomology", "check_chain_map",
    "cohomology", "cone", "direct_sum", "double_dual_iso", "dual", "format_scalar",
    "nullspace", "parse_scalar", "rank", "shift", "tensor", "to_rational",
]
