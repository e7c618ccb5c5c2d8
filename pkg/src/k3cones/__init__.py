"""Cones of divisors on moduli spaces of sheaves on K3 surfaces of Picard rank one.

The layers are

* :mod:`k3cones.lattice`: the algebraic Mukai lattice and orthogonal complements,
* :mod:`k3cones.diophantine`: Pell equations and indefinite binary quadratic forms,
* :mod:`k3cones.cones`: walls, their types, and the Eff/Mov/Nef cones,
* :mod:`k3cones.bundles`: projectivized bundles P(F) and the thresholds alpha_e, alpha_n,
* :mod:`k3cones.catalog` and :mod:`k3cones.cli`: tables, audit and rendering.
"""
from .bundles import (
    BundleSetup,
    Threshold,
    hilbert_setup,
    kernel_of_polarization,
    kernel_setup,
    lm_from_rgd,
    restrict_ray,
    rho,
    theorem_hypotheses,
    thresholds,
)
from .catalog import (
    DiscrepancyReport,
    TableSpec,
    WallRow,
    cone_report,
    parse_json,
    render,
    run_corollary_audit,
    run_cotangent_table,
    run_rank2_tables,
    run_wall_table,
)
from .cli import cli_main
from .cones import (
    classify_wall,
    effective_cone,
    enumerate_walls,
    flop_report,
    movable_cone,
    movable_walls,
    nef_cone,
    orient_reference,
)
from .diophantine import (
    bqf_automorphism,
    bqf_representatives,
    bqf_solve,
    brute_oracle,
    pell_fundamental,
    pell_general,
)
from .errors import K3ConesError
from .lattice import MukaiVector, SurfaceParams, orth_basis, pair, square

__version__ = "0.1.0"

__all__ = [
    "BundleSetup",
    "DiscrepancyReport",
    "K3ConesError",
    "MukaiVector",
    "SurfaceParams",
    "TableSpec",
    "Threshold",
    "WallRow",
    "bqf_automorphism",
    "bqf_representatives",
    "bqf_solve",
    "brute_oracle",
    "classify_wall",
    "cli_main",
    "cone_report",
    "effective_cone",
    "enumerate_walls",
    "flop_report",
    "hilbert_setup",
    "kernel_of_polarization",
    "kernel_setup",
    "lm_from_rgd",
    "movable_cone",
    "movable_walls",
    "nef_cone",
    "orient_reference",
    "orth_basis",
    "pair",
    "parse_json",
    "pell_fundamental",
    "pell_general",
    "render",
    "restrict_ray",
    "rho",
    "run_corollary_audit",
    "run_cotangent_table",
    "run_rank2_tables",
    "run_wall_table",
    "square",
    "theorem_hypotheses",
    "thresholds",
]
