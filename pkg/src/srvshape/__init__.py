"""Elastic shape analysis of open curves with tangent-space discriminant classification."""
from .alignment import align, optimal_reparam, optimal_rotation, shape_distance
from .basis import build_data_matrix, build_tangent_basis, project_coefficients, reconstruct
from .curve import Curve, Srvf, from_srvf, normalize_length, preprocess, resample, to_srvf
from .discriminant import classify, decision_boundary_residual, fit
from .evaluation import kfold_cv, report
from .karcher import KarcherConfig, karcher_mean, lift_to_tangent
from .pipeline import PipelineSettings, ShapeModel, classify_curve, fit_curves
from .sphere import exp_map, geodesic_distance, inner, log_map, project_tangent
from .synthetic import SynthConfig, generate_synthetic

__version__ = "0.1.0"
