"""Discrete Moutard nets (T-nets) and discrete isothermic nets.

Projective T-nets and their transformations, T-nets in quadrics, and the
Moebius, Laguerre and Lie sphere pictures of discrete isothermic,
L-isothermic and S-isothermic surfaces.
"""

from .errors import (
    BoundaryError,
    ClosureError,
    DegenerateConfigurationError,
    DimensionError,
    GaugeClosureError,
    GeometryError,
    InternalConsistencyError,
    MoutardError,
    NetFormatError,
    NonUniqueError,
    PreconditionError,
    SingularConfigurationError,
    TouchingConfigurationError,
    UnsupportedVersionError,
)
from .lattice import EdgeLabels, LatticeBox, check_labelling, set_threads
from .moutard_core import (
    TNet,
    certify_tnet,
    complete_hexahedron,
    moutard_transform,
    propagate_tnet,
    star_triangle,
)
from .pseudo_euclidean import Signature, Space
from .quadric import QuadricSpec, extract_labelling, propagate_quadric_tnet, quadric_step
from .report import VerificationReport
from .spheres import OrientedPlane, OrientedSphere

__version__ = "0.1.0"

__all__ = [
    "BoundaryError", "ClosureError", "DegenerateConfigurationError", "DimensionError", "GaugeClosureError",
    "GeometryError", "InternalConsistencyError", "MoutardError", "NetFormatError", "NonUniqueError",
    "PreconditionError", "SingularConfigurationError", "TouchingConfigurationError", "UnsupportedVersionError",
    "EdgeLabels", "LatticeBox", "check_labelling", "set_threads",
    "TNet", "certify_tnet", "complete_hexahedron", "moutard_transform", "propagate_tnet", "star_triangle",
    "Signature", "Space", "QuadricSpec", "extract_labelling", "propagate_quadric_tnet", "quadric_step",
    "VerificationReport", "OrientedPlane", "OrientedSphere",
]
