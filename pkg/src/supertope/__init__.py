"""Exact verification toolkit for perfect Delaunay lattice polytopes."""

__version__ = "0.1.0"

from .construct import (  # noqa: E402
    DoubledPolytope,
    GramStructure,
    build_upsilon,
    diagonal_lattice,
    double_to_C,
    find_apexes,
    gram_structure,
    lovasz_bound,
    closed_form_alpha,
)
from .disambiguate import disambiguate_families, verify_reading  # noqa: E402
from .enumeration import (  # noqa: E402
    DelaunayVerifier,
    check_delaunay,
    enumerate_nonpositive,
    lattice_minimal_vectors,
    parity_class_minima,
)
from .exact import SubLattice, det_exact, hnf_basis, ldlt_pd_check, member_of_lattice, rank_nullspace  # noqa: E402
from .families import (  # noqa: E402
    FamilySpec,
    LatticePolytope,
    PolytopeConfig,
    bundled_config,
    expand_family,
    load_polytope_config,
    parse_family,
)
from .hull import relative_volume, search_simplices, skeleton, srg_check, triangle_census  # noqa: E402
from .quadric import (  # noqa: E402
    CircumscribedQuadric,
    InhomQuadric,
    audit_theorem,
    evaluate,
    fit_quadric_space,
    closed_form,
)
