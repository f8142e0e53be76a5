"""Projection depth for vectors, matrices and higher-order tensors.

Depth scores how central a point is within a data cloud: outlyingness is
the supremum over unit projection directions of the standardised distance
from the projected centre, and depth is 1/(1 + outlyingness).  The package
covers the exact mean/std (Rayleigh quotient) form, a budgeted median/MAD
search, an alternating solver for tensor-valued observations, mode-wise PCA
for rank-deficient samples, a maximum-depth classifier and a seeded
experiment harness, all behind a CLI (``tpdepth``).
"""
from importlib import metadata

try:
    __version__ = metadata.version("tensordepth")
except metadata.PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from . import tensor_pca
from .classify import (
    ExperimentProtocol,
    ExperimentReport,
    LabeledDataset,
    MaxDepthClassifier,
    RoundResult,
    SizeResult,
    max_depth_classify,
    run_experiment,
)
from .errors import (
    DataFormatError,
    DegenerateSampleError,
    DepthError,
    DimensionError,
    ProtocolError,
    RankDeficiencyError,
)
from .locscale import LocationScale, location, scale
from .tensor import (
    DenseTensor,
    TensorSample,
    bilinear_project,
    frobenius_norm,
    inner_product,
    mode_contract,
    reshape,
    vectorize,
)
from .tensor_depth import (
    TpdConfig,
    TpdResult,
    tpd_depth,
    tpd_outlyingness,
    tpd_outlyingness_matrix,
    tpd_outlyingness_order_k,
)
from .vector_depth import (
    OutlyingnessResult,
    SearchBudget,
    VectorSample,
    approx_outlyingness_medmad,
    depth_from_outlyingness,
    pca_project,
    principal_basis,
    projection_depth,
    rayleigh_outlyingness,
)

__all__ = [
    "__version__",
    "tensor_pca",
    "DenseTensor",
    "TensorSample",
    "inner_product",
    "frobenius_norm",
    "mode_contract",
    "bilinear_project",
    "vectorize",
    "reshape",
    "LocationScale",
    "location",
    "scale",
    "OutlyingnessResult",
    "SearchBudget",
    "VectorSample",
    "rayleigh_outlyingness",
    "projection_depth",
    "approx_outlyingness_medmad",
    "pca_project",
    "principal_basis",
    "depth_from_outlyingness",
    "TpdConfig",
    "TpdResult",
    "tpd_outlyingness_matrix",
    "tpd_outlyingness_order_k",
    "tpd_outlyingness",
    "tpd_depth",
    "LabeledDataset",
    "MaxDepthClassifier",
    "max_depth_classify",
    "ExperimentProtocol",
    "ExperimentReport",
    "RoundResult",
    "SizeResult",
    "run_experiment",
    "DepthError",
    "DimensionError",
    "DataFormatError",
    "DegenerateSampleError",
    "RankDeficiencyError",
    "ProtocolError",
]
