"""Lattice quantizer toolkit.

Constructs high-dimensional lattice quantizers by fusing low-dimensional
component lattices, evaluates their normalized second moment by Monte Carlo
with confidence intervals, and improves them by stochastic gradient descent
over Householder or matrix-exponential fusion transforms.
"""

__version__ = "0.1.0"

from .lattices import (GeneratorMatrix, LatticeError, LatticeRecord,
                       UnknownLatticeError, catalog_get, catalog_names,
                       direct_sum, gram, scale, volume)
from .cvp import (ClosestPointSolver, CvpResult, ReducedBasis, babai_nearest,
                  closest_point, kissing_number, lll_reduce, shortest_vector)
from .nsm import NsmEstimate, confidence_interval, estimate_nsm, sample_uniform_mod_lattice
from .fusion import (FusionSpec, build_product, optimal_scaling, optimal_spec,
                     parse_components, predicted_product_nsm, product_record)
from .orthogonal import (ExpParam, HouseholderParam, householder_matrix,
                         householder_vjp, matrix_exp, matrix_exp_vjp, skew_init)
from .optimizer import (FusionModel, TrainConfig, TrainHistory,
                        TrainingDiverged, assemble, evaluate, load_checkpoint,
                        loss, loss_grad_G, make_model, save_checkpoint, train)

__all__ = [
    "GeneratorMatrix", "LatticeRecord", "LatticeError", "UnknownLatticeError",
    "gram", "volume", "scale", "direct_sum", "catalog_get", "catalog_names",
    "ReducedBasis", "CvpResult", "ClosestPointSolver", "lll_reduce",
    "closest_point", "babai_nearest", "shortest_vector", "kissing_number",
    "NsmEstimate", "estimate_nsm", "confidence_interval",
    "sample_uniform_mod_lattice",
    "FusionSpec", "parse_components", "optimal_scaling", "optimal_spec",
    "predicted_product_nsm", "build_product", "product_record",
    "HouseholderParam", "ExpParam", "householder_matrix", "householder_vjp",
    "matrix_exp", "matrix_exp_vjp", "skew_init",
    "FusionModel", "TrainConfig", "TrainHistory", "TrainingDiverged",
    "assemble", "loss", "loss_grad_G", "train", "evaluate", "make_model",
    "save_checkpoint", "load_checkpoint",
]
