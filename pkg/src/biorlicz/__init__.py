"""Bi-Orlicz-Sobolev extensions of circle homeomorphisms, built and measured numerically."""

from .boundary import (BoundaryHomeo, DyadicImageTable, PiecewiseLinearHomeo, construct_family,
                       image_lengths)
from .douglas import continuous_douglas, discrete_douglas, equivalence_report
from .errors import (BiOrliczError, ConfigurationError, ConstructionError, DataError,
                     DomainError, OrientationError, PreconditionError, ResolutionError)
from .extension import (ExtensionMesh, build_extension, differential, energy_report, evaluate,
                        homeo_audit, merge_level, orlicz_energy)
from .nfunc import NFunction, by_name, check_ainc, check_doubling, growth_report, tail_integral

__version__ = "0.1.0"

__all__ = [
    "BoundaryHomeo", "DyadicImageTable", "PiecewiseLinearHomeo", "construct_family",
    "image_lengths", "continuous_douglas", "discrete_douglas", "equivalence_report",
    "BiOrliczError", "ConfigurationError", "ConstructionError", "DataError", "DomainError",
    "OrientationError", "PreconditionError", "ResolutionError", "ExtensionMesh",
    "build_extension", "differential", "energy_report", "evaluate", "homeo_audit",
    "merge_level", "orlicz_energy", "NFunction", "by_name", "check_ainc", "check_doubling",
    "growth_report", "tail_integral",
]
