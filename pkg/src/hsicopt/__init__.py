"""Optimization-aware input screening with kernel (HSIC) sensitivity indices.

Typical pipeline: sample a design, compute HSIC-IT indices of the sublevel
indicator over an alpha grid, freeze inputs below ``0.1 * max``, then
optimize the reduced problem with a derivative-free constrained method.
"""
from .errors import (ArgumentError, DegenerateError, DegenerateOutputWarning,
                     DegenerateScaleError, DegenerateSetError, DegenerateVarianceError,
                     DomainError, EvaluationError, HsicoptError, InfeasibleError, ShapeError)
from .hsic import IndexTable, hsic_biased, hsic_it, mmd2_biased, normalize, replicate_indices
from .kernels import KernelSpec, center, gram, median_bandwidth
from .problem import BoxDomain, EvaluatedDesign, ProblemSpec, evaluate, feasible_mask
from .sampling import Seed, empirical_quantile, lhs_maximin, uniform_sample
from .sobol import (SobolTable, given_data_first_order, pick_freeze_indices,
                    pick_freeze_thresholded)
from .thresholding import (SublevelResult, ThresholdSpec, auto_relax, conditional_subset,
                           sublevel_indicator, zero_threshold)

__version__ = "0.1.0"
