from .config import ARMS, ExperimentConfig, config_from_dict, load_config
from .experiment import (
    ExperimentResult,
    RunRecord,
    run_adaptive,
    run_experiment,
    run_static,
    run_unmitigated,
)
from .output import write_outputs
