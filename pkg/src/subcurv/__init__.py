"""Numerical verification of curvature relations for Riemannian submersions."""

from .errors import (ArityError, ConfigError, DegenerateMetric, DimensionError, DomainError,
                     FrameDegenerate, ParseError, RankError, SubcurvError, UnknownExample,
                     UnknownSymbol, UnsupportedCase)
from .manifold import (ChartedManifold, CurvatureData, Point, TangentVector, christoffel,
                       christoffel_fd, covariant_derivative, curvature, curvature_fd,
                       eval_metric, parse_metric_expression)
from .submersion import (CompatibleFrame, LocalGeometry, SubmersionSpec, classify,
                         compatible_frame, differential, mean_curvature_N, nabla_A, nabla_T,
                         norms, oneill_A, oneill_T, parse_submersion, split,
                         validate_submersion)
from .tensors import Kind, generalized_array, generalized_tensor, ricci_operator
from .probe import Probe
from .identities import (IdentityResidual, Verdict, eval_generalized, eval_oneill, eval_ricci,
                         eval_scalar, eval_umbilical_corollaries)
from .gallery import NAMES as EXAMPLE_NAMES, GalleryEntry, build_example, export_text
from .suite import RunConfig, render, run_suite

__version__ = "0.1.0"
