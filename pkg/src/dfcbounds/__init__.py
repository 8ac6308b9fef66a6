"""Lower bounds on the computation time of distributed function computation
over networks of noisy channels."""
from __future__ import annotations

__version__ = "0.1.0"

from .channels import (  # noqa: E402
    Channel,
    ChannelError,
    bec,
    bsc,
    capacity,
    make_channel,
    sdpi_constant,
    sdpi_lower_estimate,
    sdpi_product_upper,
    tensor,
)
from .comp_time import (  # noqa: E402
    BoundEntry,
    BoundReport,
    CutsetStrategy,
    ayaso_baseline,
    corollary_preset,
    criteria_convert,
    t_lower_combined,
    t_lower_cutset,
    t_lower_multicut,
    t_lower_rd,
    t_lower_sdpi_single,
)
from .concentration import expected_csbp  # noqa: E402
from .infotheory import binary_divergence, binary_entropy  # noqa: E402
from .models import Distortion, FunctionSpec, Marginal, ObservationModel  # noqa: E402
from .network import (  # noqa: E402
    ChainModel,
    Network,
    NetworkError,
    PartitionError,
    SuccessivePartition,
    bfs_partition,
    cutset,
    cutset_capacity,
    diameter,
    make_topology,
    node_sdpi,
    preset_partition,
    reduce_to_chain,
    validate_partition,
)
from .simulator import (  # noqa: E402
    AlgorithmSpec,
    TrialResult,
    analytic_repetition_parity,
    empirical_computation_time,
    run_algorithm,
)

__all__ = [
    "__version__",
    "Channel", "ChannelError", "bec", "bsc", "capacity", "make_channel",
    "sdpi_constant", "sdpi_lower_estimate", "sdpi_product_upper", "tensor",
    "BoundEntry", "BoundReport", "CutsetStrategy", "ayaso_baseline", "corollary_preset",
    "criteria_convert", "t_lower_combined", "t_lower_cutset", "t_lower_multicut", "t_lower_rd",
    "t_lower_sdpi_single", "expected_csbp",
    "AlgorithmSpec", "TrialResult", "analytic_repetition_parity", "empirical_computation_time",
    "run_algorithm",
    "binary_divergence", "binary_entropy",
    "Distortion", "FunctionSpec", "Marginal", "ObservationModel",
    "ChainModel", "Network", "NetworkError", "PartitionError", "SuccessivePartition",
    "bfs_partition", "cutset", "cutset_capacity", "diameter", "make_topology",
    "node_sdpi", "preset_partition", "reduce_to_chain", "validate_partition",
]
