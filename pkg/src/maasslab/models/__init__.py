"""Data models for the laboratory."""

from .arithmetic import CoefficientTable, KloostermanQuery
from .complex_ap import ComplexAP, StirlingApprox
from .lfunction import AfeKernelSpec, GammaFactor
from .report import Provenance, VerificationReport
from .run_config import RunConfig
from .spectrum import MaassFormRecord, SpectrumFile, ValidationFailure
from .trace import ExpansionLedger, GaussianPolyTerm, TraceLedger, TraceQuery
from .transforms import BumpSpec, TransformSpec
from .voronoi import PsiPmSpec, VoronoiKernelPoint
from .weights import WeightParams, WeightSample

__all__ = [
    "AfeKernelSpec",
    "BumpSpec",
    "CoefficientTable",
    "ExpansionLedger",
    "ComplexAP",
    "GammaFactor",
    "GaussianPolyTerm",
    "KloostermanQuery",
    "MaassFormRecord",
    "Provenance",
    "PsiPmSpec",
    "RunConfig",
    "SpectrumFile",
    "StirlingApprox",
    "TraceLedger",
    "TraceQuery",
    "TransformSpec",
    "ValidationFailure",
    "VerificationReport",
    "VoronoiKernelPoint",
    "WeightParams",
    "WeightSample",
]
