"""Trainable quantum kernels over multi-view data.

Each view of a dataset gets its own parameterized encoding circuit whose
state overlaps define a kernel. Circuit parameters are fitted by gradient
ascent on a hybrid global/local kernel-target alignment score, the per-view
kernels are fused with alignment-optimized convex weights, and the combined
kernel feeds a precomputed-kernel SVM. A Gaussian multi-kernel baseline
shares the same fusion and classification path.
"""

__version__ = "0.1.0"

from .qsim.ansatz import AnsatzParams
from .alignment import AlignmentConfig, NeighborSets
from .trainer import TrainConfig, Stage1Result, Stage2Result
from .experiment import ExperimentConfig, RunReport, SyntheticSpec

__all__ = [
    "__version__",
    "AnsatzParams",
    "AlignmentConfig",
    "NeighborSets",
    "TrainConfig",
    "Stage1Result",
    "Stage2Result",
    "ExperimentConfig",
    "RunReport",
    "SyntheticSpec",
]
