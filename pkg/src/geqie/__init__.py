"""geqie: a quantum image encoding engine.

Images (and voxel grids) are encoded into statevectors via lattice-family
position/value maps, simulated ideally or under depolarizing noise,
sampled into measurement histograms, retrieved back into images, and
scored with correlation and PSNR metrics.
"""

from .encodings import (
    METHOD_NAMES,
    MethodDescriptor,
    encode,
    lookup,
    measurement_weights,
    qubit_budget,
    registry_list,
    retrieve,
    roundtrip,
)
from .errors import CapacityError, DomainError, FormatError, GeqieError, ModelError
from .estimator import QuantumImageCodec
from .metrics import MetricPair, image_metrics, mse, pcc, psnr, psnr_display_cap
from .model import (
    EncodingModel,
    ImageArray,
    UnitaryMatrix,
    VerificationReport,
    assemble_state,
    completion_unitary,
    padded_extents,
    verify_model,
)
from .simcore import (
    CountsHistogram,
    DensityMatrix,
    NoiseMode,
    NoiseSpec,
    StateVector,
    apply_all_qubit_depolarizing,
    apply_global_depolarizing,
    apply_local_depolarizing,
    measure_probabilities,
    sample_counts,
    sample_counts_trajectories,
    to_density,
)

__version__ = "0.1.0"

__all__ = [
    "METHOD_NAMES",
    "MethodDescriptor",
    "encode",
    "lookup",
    "measurement_weights",
    "qubit_budget",
    "registry_list",
    "retrieve",
    "roundtrip",
    "CapacityError",
    "DomainError",
    "FormatError",
    "GeqieError",
    "ModelError",
    "QuantumImageCodec",
    "MetricPair",
    "image_metrics",
    "mse",
    "pcc",
    "psnr",
    "psnr_display_cap",
    "EncodingModel",
    "ImageArray",
    "UnitaryMatrix",
    "VerificationReport",
    "assemble_state",
    "completion_unitary",
    "padded_extents",
    "verify_model",
    "CountsHistogram",
    "DensityMatrix",
    "NoiseMode",
    "NoiseSpec",
    "StateVector",
    "apply_all_qubit_depolarizing",
    "apply_global_depolarizing",
    "apply_local_depolarizing",
    "measure_probabilities",
    "sample_counts",
    "sample_counts_trajectories",
    "to_density",
    "__version__",
]
