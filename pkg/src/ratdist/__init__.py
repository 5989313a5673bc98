"""Exact-arithmetic toolkit for rational distance sets.

Modules: ``exactnum`` (rationals, Q(sqrt(-k)), polynomials), ``planeset``
(configurations, verification, normalization, audits, inversion),
``curvelift`` (isotropic lines, transversality, double covers),
``surfacelift`` (quadric systems, lifting, general-type certificates),
``searchgen`` (fixtures and bounded-height search), and ``cli``.
"""

from .planeset import Configuration, DistanceMatrix, LatticePoint
from .curvelift import IsotropicLine, PlaneCurve
from .surfacelift import GeneralTypeCertificate, LiftedPoint, QuadricSystem
from .searchgen import SearchCheckpoint, SearchSpec

__all__ = [
    "Configuration",
    "DistanceMatrix",
    "GeneralTypeCertificate",
    "IsotropicLine",
    "LatticePoint",
    "LiftedPoint",
    "PlaneCurve",
    "QuadricSystem",
    "SearchCheckpoint",
    "SearchSpec",
]

__version__ = "0.1.0"
