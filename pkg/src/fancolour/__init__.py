"""fancolour: list colouring of locally sparse graphs by hard-core resampling.

Two-phase pipeline: a flaw-driven local search drives every vertex to a state
with many surviving colours and little colour competition, then uniform
sampling with conflict resampling finishes the colouring. Exact hard-core
sampling on neighbourhood covers (possible whenever the neighbourhood has no
long path after removing one edge per path copy) powers the first phase.
"""

from ._core import BACKEND
from .cover import (
    Cover,
    Flaw,
    PartialColouring,
    build_list_cover,
    deg_star,
    is_B_flawed,
    least_flaw,
    residual_cover,
    uniform_lists,
)
from .finisher import run_phase2
from .graph import (
    Graph,
    PathCopy,
    average_degree,
    count_fans_per_vertex,
    enumerate_path_copies,
    is_path_free,
    longest_path,
    max_average_degree,
    neighbourhood_subgraph,
    read_graph,
    write_graph,
)
from .hardcore import (
    CapExceeded,
    HardCoreInstance,
    HardCoreSampler,
    LogZBounds,
    OccupancyCertificate,
    PathFreeViolation,
    check_strong_local_occupancy,
    derive_occupancy_certificate,
    lambert_w,
    log_z_lower_bounds,
    occupancy_fraction,
    partition_function_bruteforce,
    partition_function_pkfree,
    sample_hardcore,
)
from .resampler import (
    BudgetExceeded,
    Params,
    RemoveResult,
    RunReport,
    address_B,
    address_U,
    derive_params,
    remove_edges,
    run_phase1,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetExceeded",
    "CapExceeded",
    "Cover",
    "Flaw",
    "Graph",
    "HardCoreInstance",
    "HardCoreSampler",
    "LogZBounds",
    "OccupancyCertificate",
    "Params",
    "PartialColouring",
    "PathCopy",
    "PathFreeViolation",
    "RemoveResult",
    "RunReport",
    "address_B",
    "address_U",
    "average_degree",
    "build_list_cover",
    "check_strong_local_occupancy",
    "count_fans_per_vertex",
    "deg_star",
    "derive_occupancy_certificate",
    "derive_params",
    "enumerate_path_copies",
    "is_B_flawed",
    "is_path_free",
    "lambert_w",
    "least_flaw",
    "log_z_lower_bounds",
    "longest_path",
    "max_average_degree",
    "neighbourhood_subgraph",
    "occupancy_fraction",
    "partition_function_bruteforce",
    "partition_function_pkfree",
    "read_graph",
    "remove_edges",
    "residual_cover",
    "run_phase1",
    "run_phase2",
    "sample_hardcore",
    "uniform_lists",
    "write_graph",
]
