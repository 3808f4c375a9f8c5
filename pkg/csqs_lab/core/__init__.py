"""csqs-lab 核心模块"""

# 配置与异常
from .config import ConfigManager, get_config_manager, set_config_manager
from .config_models import LabConfig, Tolerances
from .exceptions import *

# 态、相空间与度量
from .csqs_model import NormalizedCsqs, StateParams, moment_closed, normalize
from .loss_channel import LossParams, lossy_field, lossy_wigner_closed
from .measures import MeasureReport, evaluate_measures
from .phase_space import PhaseGrid, WignerField, negativity_volume, wigner_closed, wigner_field

__all__ = [
    "ConfigManager",
    "get_config_manager",
    "set_config_manager",
    "LabConfig",
    "Tolerances",
    "StateParams",
    "NormalizedCsqs",
    "normalize",
    "moment_closed",
    "PhaseGrid",
    "WignerField",
    "wigner_closed",
    "wigner_field",
    "negativity_volume",
    "MeasureReport",
    "evaluate_measures",
    "LossParams",
    "lossy_wigner_closed",
    "lossy_field",
]
