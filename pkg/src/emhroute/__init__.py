"""Learning-based multi-hop uplink routing for LPWANs: simulator, EMH learner and metrics."""
from .channel import estimate_rssi_vector, select_tx_power
from .config import ExperimentConfig, office_config, load_config
from .learner import ExperimentTrace, LearnerState, choose_action, run_experiment, update
from .metrics import compare, estimate_lifetime, historic_bottleneck, moving_average, saving_ratio
from .model import (
    GATEWAY,
    ChannelParams,
    Deployment,
    MacParams,
    RadioParams,
    RoutingVector,
    children_of,
    parent_of,
    validate_routing,
)
from .routing_space import (
    build_constrained_space,
    count_all_routings,
    enumerate_constrained,
    sample_unexplored,
)
from .simulator import measure_routing, measure_single_hop

__version__ = "0.1.0"
