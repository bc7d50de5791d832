"""Occlusion-aware potential-field path planning on a simulated expressway."""
from .errors import (DegenerateForce, GeometryError, NumericalError, OccpfError, ParameterError,
                     ParseError, StateError, ValidationError)
from .kernels import backend
from .planner import MODES, PF_CS, PF_OAPP, PF_SP
from .scenario import Scenario, bundled_scenario_path, load_scenario
from .sim import EgoTrace, MetricsReport, compute_metrics, run_simulation

__version__ = "0.1.0"
