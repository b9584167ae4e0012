import math

import pytest

from cat0kit import (
    EuclideanSpace,
    HyperboloidSpace,
    Point,
    ProductSpace,
    SphereSpace,
    TreeSpace,
    unit_star,
)

# a less symmetric tree for sampled checks
SKEW_TREE_EDGES = (
    (0, 1, 1.0), (0, 2, 0.5), (0, 3, 2.0), (1, 4, 1.5), (1, 5, 0.7), (3, 6, 1.2),
)


def E(*coords):
    return Point("euclidean", tuple(float(c) for c in coords))


def skew_tree():
    return TreeSpace(7, SKEW_TREE_EDGES)


def cat0_spaces():
    """One instance of every CAT(0) model used by the sampled checks."""
    return {
        "euclidean2": EuclideanSpace(2),
        "euclidean5": EuclideanSpace(5),
        "hyperboloid2": HyperboloidSpace(2),
        "hyperboloid3": HyperboloidSpace(3),
        "tripod": unit_star(),
        "skew_tree": skew_tree(),
        "product": ProductSpace((EuclideanSpace(1), unit_star())),
        "product_hyp_tree": ProductSpace((HyperboloidSpace(2), skew_tree())),
    }


def all_spaces():
    spaces = cat0_spaces()
    spaces["sphere2"] = SphereSpace(2)
    return spaces


@pytest.fixture
def tripod():
    return unit_star()


@pytest.fixture
def plane():
    return EuclideanSpace(2)


def scaled(tol, *magnitudes):
    return tol * (1.0 + max((abs(m) for m in magnitudes), default=0.0))


def cosh1_point():
    return Point("hyperboloid", (math.cosh(1.0), math.sinh(1.0), 0.0))
