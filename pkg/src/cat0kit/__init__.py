"""Quasilinearization, metric projection and sampled certificates in CAT(0) model spaces."""
from .core import ATOL, OrientedPair, Point, Space, cat0_residual, combine, cs_gap, dist, pair, quasilin
from .spaces import (
    EuclideanSpace,
    HyperboloidSpace,
    ProductSpace,
    SampleSeed,
    SphereSpace,
    TreeLoc,
    TreeSpace,
    build_space,
    canonicalize_tree_point,
    sample_point,
    sample_points,
    unit_star,
)
from .sets import (
    Ball,
    Halfspaces,
    ProjectionResult,
    Segment,
    Subtree,
    contains,
    halfspaces,
    project,
    project_ball,
    project_halfspaces,
    project_segment,
    project_subtree,
    sample_in_set,
)
from .certify import (
    CertificateReport,
    MapUnderTest,
    boundary_escape_check,
    cat0_certify,
    distance_certificate,
    lemma21_residual,
    map_property_report,
    vi_certificate,
)

__version__ = "0.1.0"
