"""Min-max transmit-delay power allocation for a sensing roadside unit.

The library models a roadside unit that senses vehicle positions with the
same signal it uses to serve them data, and allocates its transmit power so
the slowest vehicle finishes as fast as possible, subject to sensing
accuracy floors and the total power budget.
"""

from .allocate import (AllocationResult, FeasibilityVerdict, SolverParams,
                       alg1_delay_bisection, alg2_complementary, check_feasible,
                       closed_form_equal_payload, epa, oracle_grid_search,
                       validate_result)
from .arrays import (SPEED_OF_LIGHT, ArrayConfig, VehicleState,
                     comm_channel_gain, doppler_shift_comm, doppler_shift_radar,
                     echo_delay, large_scale_gain, steering_vector)
from .config import SweepSpec, load_scenario, load_sweep_spec
from .errors import (ConfigError, ConvergenceError, FloorViolationError,
                     InfeasibleError, UnequalPayloadsError)
from .latency import LinkCoefficients, delay, make_link, rate
from .pcrb import (PcrbModel, PcrbThresholds, build_pcrb_model, pcrb_angle,
                   pcrb_dist, power_floor_exact, power_floor_relaxed)
from .scenario import (POLICIES, RoadScenario, SlotRecord, VehicleSpec,
                       kinematics_step, predict_angle, road_geometry, run_slot,
                       run_slots, slot_links)

__version__ = "0.1.0"

__all__ = [
    "AllocationResult", "ArrayConfig", "ConfigError", "ConvergenceError",
    "FeasibilityVerdict", "FloorViolationError", "InfeasibleError",
    "LinkCoefficients", "PcrbModel", "PcrbThresholds", "POLICIES",
    "RoadScenario", "SPEED_OF_LIGHT", "SlotRecord", "SolverParams",
    "SweepSpec", "UnequalPayloadsError", "VehicleSpec", "VehicleState",
    "alg1_delay_bisection", "alg2_complementary", "build_pcrb_model",
    "check_feasible", "closed_form_equal_payload", "comm_channel_gain",
    "delay", "doppler_shift_comm", "doppler_shift_radar", "echo_delay", "epa",
    "kinematics_step", "large_scale_gain", "load_scenario", "load_sweep_spec",
    "make_link", "oracle_grid_search", "pcrb_angle", "pcrb_dist",
    "power_floor_exact", "power_floor_relaxed", "predict_angle", "rate",
    "road_geometry", "run_slot", "run_slots", "slot_links", "steering_vector",
    "validate_result",
]
