"""Exact construction, verification, and nodal-domain counting of caloric polynomials."""

from .polyring import (
    DimensionMismatch,
    ExponentVector,
    NotHomogeneous,
    NotOnUnitCircle,
    ParseError,
    Polynomial,
    PolynomialError,
    ZeroPolynomialError,
    embed,
    heat_apply,
    laplacian,
    parabolic_degree,
    parse_poly,
    rotate_xy,
    rotate_xy_float,
)
from .caloric import (
    CaloricResult,
    ChainReport,
    CheckResult,
    MultiIndex,
    ParabolaFactors,
    WeightedInnerProduct,
    basic_hcp,
    basis,
    chain_check,
    eigen_check,
    hermite,
    hermite_relation_check,
    interlacing_check,
    is_caloric,
    parabola_factors,
    product_hcp,
    weighted_inner_product,
)
from .constructions import (
    ConstructionError,
    ConstructionSpec,
    HarmonicSeed,
    ScanResult,
    build,
    fixture,
    harmonic_2d,
    high_dim,
    lewy_2mod4,
    odd_construction,
    product_lower,
    scan_epsilon,
    zero_mod4,
)
from .nodal import (
    BoundViolation,
    BoundsReport,
    ComponentReport,
    CrossSectionGrid,
    PolarChamberReport,
    SignField,
    SliceReport,
    bounds_report,
    cluster_count,
    count_components,
    cube_section_sample,
    export_nodal_pointcloud,
    nodal_count,
    polar_chambers,
    slice_count,
    sphere_grid_count,
)

__version__ = "0.1.0"
