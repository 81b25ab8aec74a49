"""Straight-road kinematics, beam-angle prediction, and per-slot allocation runs.

Vehicles move at constant speed along a road parallel to the RSU array, at
perpendicular offset rsu_offset_m.  Transmit beams point at one-slot-ahead
angle predictions, receive beams at two-slot-ahead predictions; both are
linear extrapolations of the true angle track plus configurable Gaussian
perturbation (doubled for the two-slot horizon).
"""

import math
from dataclasses import dataclass

import numpy as np

from .allocate import (AllocationResult, SolverParams, alg1_delay_bisection,
                       alg2_complementary, closed_form_equal_payload, epa)
from .arrays import ArrayConfig, VehicleState
from .errors import InfeasibleError
from .latency import LinkCoefficients, make_link
from .pcrb import PcrbModel, PcrbThresholds, pcrb_angle, pcrb_dist

POLICIES = ("epa", "closed_form", "alg1", "alg2")

_ANGLE_CLAMP = 1e-6


@dataclass(frozen=True)
class VehicleSpec:
    """Initial longitudinal position, speed, payload and sensing model."""

    position_m: float
    speed_mps: float
    payload_bits: float
    pcrb: PcrbModel

    def __post_init__(self):
        if not self.payload_bits > 0:
            raise ValueError("payload_bits must be > 0")


@dataclass(frozen=True)
class RoadScenario:
    """Everything needed to run the allocators over a sequence of slots."""

    rsu_offset_m: float
    slot_s: float
    n_slots: int
    vehicles: tuple
    p_max: float
    thresholds: PcrbThresholds
    arrays: ArrayConfig
    deadline_s: float | None = None
    predict_noise_std_rad: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        if not self.rsu_offset_m > 0:
            raise ValueError("rsu_offset_m must be > 0")
        if not self.slot_s > 0:
            raise ValueError("slot_s must be > 0")
        if self.n_slots < 1:
            raise ValueError("n_slots must be >= 1")
        if len(self.vehicles) == 0:
            raise ValueError("at least one vehicle is required")
        if not self.p_max > 0:
            raise ValueError("p_max must be > 0")
        if self.deadline_s is not None and not self.deadline_s > 0:
            raise ValueError("deadline_s must be > 0 when given")
        if self.predict_noise_std_rad < 0:
            raise ValueError("predict_noise_std_rad must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")


@dataclass(frozen=True)
class SlotRecord:
    """One slot's states, beam predictions, links and allocation outcome."""

    slot: int
    states: tuple
    tx_angles: tuple
    rx_angles: tuple
    links: tuple
    result: AllocationResult
    pcrb_theta: tuple
    pcrb_dist: tuple


def road_geometry(longitudinal_m: float, rsu_offset_m: float):
    """Angle against the array axis and range for a longitudinal coordinate."""
    if not rsu_offset_m > 0:
        raise ValueError("rsu_offset_m must be > 0")
    dist = math.hypot(longitudinal_m, rsu_offset_m)
    angle = math.acos(longitudinal_m / dist)
    return angle, dist


def kinematics_step(longitudinal_m: float, speed_mps: float, slot_s: float,
                    rsu_offset_m: float):
    """Advance one slot of constant-velocity motion; returns (angle, dist, x)."""
    if not slot_s > 0:
        raise ValueError("slot_s must be > 0")
    new_x = longitudinal_m + speed_mps * slot_s
    angle, dist = road_geometry(new_x, rsu_offset_m)
    return angle, dist, new_x


def predict_angle(history, horizon: int, noise_std_rad: float, rng) -> float:
    """Extrapolate the angle track 'horizon' slots ahead of its newest usable point.

    The one-slot prediction extends the last two angles; the two-slot
    prediction ignores the newest angle and extends the two before it, with
    the Gaussian perturbation std scaled by the horizon.  The output is
    clamped strictly inside (0, pi).
    """
    if horizon not in (1, 2):
        raise ValueError("horizon must be 1 or 2")
    if noise_std_rad < 0:
        raise ValueError("noise_std_rad must be >= 0")
    track = [float(v) for v in history]
    if len(track) < horizon + 1:
        raise ValueError(
            f"need at least {horizon + 1} past angles for a {horizon}-slot prediction")
    anchor = track[-horizon]
    previous = track[-horizon - 1]
    predicted = anchor + horizon * (anchor - previous)
    predicted += horizon * noise_std_rad * float(rng.standard_normal())
    return min(max(predicted, _ANGLE_CLAMP), math.pi - _ANGLE_CLAMP)


def _trajectory(vehicle: VehicleSpec, scenario: RoadScenario, slot_index: int):
    # Forward kinematics from the initial position, one entry per slot.
    states = []
    x = vehicle.position_m
    for _ in range(slot_index + 1):
        angle, dist, x = kinematics_step(x, vehicle.speed_mps, scenario.slot_s,
                                         scenario.rsu_offset_m)
        states.append((angle, dist, x))
    return states


def _angle_at(vehicle: VehicleSpec, scenario: RoadScenario, slot: int,
              trajectory) -> float:
    if slot >= 0:
        return trajectory[slot][0]
    # Virtual pre-simulation slot: constant velocity extends backwards, so
    # slot-0 predictions have a genuine history to extrapolate from.
    x = vehicle.position_m + (slot + 1) * vehicle.speed_mps * scenario.slot_s
    return road_geometry(x, scenario.rsu_offset_m)[0]


def _radar_coeff(dist_m: float, cfg: ArrayConfig) -> complex:
    # Round-trip magnitude with unit reflection phase.
    return complex(cfg.alpha_const ** 2 / dist_m ** 2)


def _assemble_slot(scenario: RoadScenario, slot_index: int, floor_mode: str):
    # States, beam predictions and links for one slot; the RNG stream is a
    # pure function of (seed, slot_index), with draws ordered per vehicle as
    # one-slot then two-slot prediction.
    if not 0 <= slot_index < scenario.n_slots:
        raise ValueError(f"slot_index must lie in [0, {scenario.n_slots})")
    rng = np.random.default_rng([scenario.seed, slot_index])
    states = []
    tx_angles = []
    rx_angles = []
    links = []
    for k, vehicle in enumerate(scenario.vehicles):
        trajectory = _trajectory(vehicle, scenario, slot_index)
        angle, dist, _ = trajectory[slot_index]
        history = [_angle_at(vehicle, scenario, slot_index - lag, trajectory)
                   for lag in (3, 2, 1)]
        tx_est = predict_angle(history, 1, scenario.predict_noise_std_rad, rng)
        rx_est = predict_angle(history, 2, scenario.predict_noise_std_rad, rng)
        state = VehicleState(angle_rad=angle, dist_m=dist,
                             speed_mps=vehicle.speed_mps,
                             radar_coeff=_radar_coeff(dist, scenario.arrays),
                             payload_bits=vehicle.payload_bits)
        try:
            link = make_link(state, tx_est, rx_est, scenario.arrays, vehicle.pcrb,
                             scenario.thresholds, scenario.slot_s,
                             scenario.deadline_s, floor_mode, vehicle_id=k)
        except InfeasibleError as exc:
            raise InfeasibleError(f"slot {slot_index}, vehicle {k}: {exc}",
                                  deficit=exc.deficit) from exc
        states.append(state)
        tx_angles.append(tx_est)
        rx_angles.append(rx_est)
        links.append(link)
    return tuple(states), tuple(tx_angles), tuple(rx_angles), tuple(links)


def slot_links(scenario: RoadScenario, slot_index: int,
               floor_mode: str = "relaxed"):
    """Links for one slot without running an allocator (e.g. feasibility probes)."""
    return _assemble_slot(scenario, slot_index, floor_mode)[3]


def run_slot(scenario: RoadScenario, slot_index: int, policy: str,
             params: SolverParams | None = None) -> SlotRecord:
    """Advance kinematics to one slot, build links, and run one policy.

    alg2 links carry exact PCRB floors; every other policy sees the relaxed
    floors.  The per-slot RNG derives from (scenario.seed, slot_index), so
    records are reproducible slot by slot.
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}")
    params = params if params is not None else SolverParams()
    floor_mode = "exact" if policy == "alg2" else "relaxed"
    states, tx_angles, rx_angles, links = _assemble_slot(scenario, slot_index,
                                                         floor_mode)
    try:
        if policy == "epa":
            result = epa(links, scenario.p_max)
        elif policy == "closed_form":
            result = closed_form_equal_payload(links, scenario.p_max)
        elif policy == "alg1":
            result = alg1_delay_bisection(links, scenario.p_max, params)
        else:
            result = alg2_complementary(links, scenario.p_max, params)
    except InfeasibleError as exc:
        raise InfeasibleError(f"slot {slot_index} ({policy}): {exc}",
                              deficit=exc.deficit) from exc

    theta_bounds = tuple(pcrb_angle(float(result.powers[k]), v.pcrb)
                         for k, v in enumerate(scenario.vehicles))
    dist_bounds = tuple(pcrb_dist(float(result.powers[k]), v.pcrb)
                        for k, v in enumerate(scenario.vehicles))
    return SlotRecord(slot=slot_index, states=states,
                      tx_angles=tx_angles, rx_angles=rx_angles,
                      links=links, result=result,
                      pcrb_theta=theta_bounds, pcrb_dist=dist_bounds)


def run_slots(scenario: RoadScenario, policy: str,
              params: SolverParams | None = None):
    """Run every slot of the scenario under one policy."""
    return [run_slot(scenario, i, policy, params) for i in range(scenario.n_slots)]
