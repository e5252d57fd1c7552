"""Face models, Drinfeld and ribbon operators, and link invariants of braid closures."""

from .core import (BlockOperator, EdgeOperator, FaceModel, OrientedGraph, Path, embed, enumerate_paths,
                   model_as_operator, partial_trace_last, truncated_tensor)
from .numerics import SpectralData, commutant_dimension, double_commutant_dimension, invert, operator_sqrt, spectral
from .verify import (CheckReport, LyubashenkoDouble, build_lyubashenko_double, check_bmw,
                     check_double_star_triangular, check_glf_commutant, check_hecke, check_star_triangular,
                     enhancement_constants)
from .drinfeld import DrinfeldOperators, LyubashenkoForms, drinfeld_operators, lyubashenko_forms, uu_commutation_check
from .ribbon import GroupLikeVector, RibbonSolution, evaluate_glf, mcrit_check, quotient_vanishing, ribbon_solve
from .catalog import ClassicalParams, SOSParams, det_vector_A, jimbo_model, scale_model, sos_model

__version__ = "0.1.0"
