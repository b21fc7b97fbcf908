"""Maximal representations of surface groups into Sp(2n, R).

Numerical and exact tools for Lagrangian geometry (Maslov indices, complex
structures, Siegel space), genus-2 Fuchsian groups, representations built from
them, the Toledo invariant, and sampled boundary maps.
"""

from .boundary import (
    LimitCurveSample,
    QiScanReport,
    VerificationReport,
    attracting_lagrangian,
    contraction_exponent,
    qi_scan,
    rectifiable_length,
    sample_limit_curve,
    verify_maximality,
    verify_monotonicity,
    verify_transversality,
)
from .maslov import (
    CirclePoint,
    complex_structure_from_triple,
    is_maximal_quadruple,
    is_maximal_triple,
    maslov_index,
    maslov_via_sign,
    monotonicity_check,
    orientation_cocycle,
)
from .numeric import ConvergenceError, NumericError, Signature, set_tolerance, sym_eigen, sym_signature
from .representations import (
    CentralizerElement,
    SurfaceRep,
    algebra_span,
    amalgam_z_rep,
    degenerate_rep,
    irreducible_rep,
    irreducible_surface_rep,
    polydisk_rep,
)
from .siegel import ComplexStructureJ, cayley, inverse_cayley, siegel_distance, standard_j
from .surface import Hyperbolization, Presentation, default_hyperbolization, default_pair, double_torus
from .symplectic import LagrangianFrame, TransversalityError, graph_map, omega, q_form
from .toledo import ToledoResult, toledo

__version__ = "0.1.0"
