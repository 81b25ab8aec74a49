"""Transmit rate, transmit delay, and the per-vehicle link coefficients.

A link is summarised by two scalars: the payload term a_coef = (D/B)*ln 2
in seconds*nats, and the effective SNR slope b_coef in 1/W, so that

    delay(p) = a_coef / ln(1 + b_coef * p)

plus the power floor that the delay deadline and the sensing bounds impose.
"""

import math
from dataclasses import dataclass

from .arrays import ArrayConfig, VehicleState, comm_channel_gain
from .errors import InfeasibleError
from .pcrb import PcrbModel, PcrbThresholds, power_floor_exact, power_floor_relaxed

LN2 = math.log(2.0)

FLOOR_MODES = ("relaxed", "exact")


@dataclass(frozen=True)
class LinkCoefficients:
    """Scalar link summary for one vehicle at one slot."""

    a_coef: float
    b_coef: float
    power_floor: float
    vehicle_id: int = 0

    def __post_init__(self):
        if not self.a_coef > 0:
            raise ValueError("a_coef must be > 0")
        if not self.b_coef > 0:
            raise ValueError("b_coef must be > 0")
        if not self.power_floor >= 0:
            raise ValueError("power_floor must be >= 0")


def rate(p: float, b_coef: float, bandwidth_hz: float) -> float:
    """Shannon rate bandwidth * log2(1 + b_coef * p) in bits/s."""
    if p < 0:
        raise ValueError("power must be >= 0")
    if not b_coef > 0 or not bandwidth_hz > 0:
        raise ValueError("b_coef and bandwidth_hz must be > 0")
    return bandwidth_hz * math.log1p(b_coef * p) / LN2


def delay(p: float, link: LinkCoefficients) -> float:
    """Transmit delay a_coef / ln(1 + b_coef * p) in seconds.

    Zero power means an unbounded delay and is rejected; allocators keep
    powers at or above strictly positive floors in practice.
    """
    if not p > 0:
        raise ValueError("delay is undefined at p <= 0")
    return link.a_coef / math.log1p(link.b_coef * p)


def make_link(state: VehicleState, tx_angle_est: float, rx_angle_est: float,
              cfg: ArrayConfig, model: PcrbModel, thr: PcrbThresholds,
              slot_s: float, t_deadline_s: float | None = None,
              floor_mode: str = "relaxed", vehicle_id: int = 0) -> LinkCoefficients:
    """Assemble LinkCoefficients from channel state and sensing requirements.

    The power floor is the larger of the deadline floor (power needed to
    finish the payload within min(slot_s, t_deadline_s)) and the PCRB floor
    selected by floor_mode ("relaxed" or "exact").  A missing deadline
    defaults to the slot length.
    """
    if not slot_s > 0:
        raise ValueError("slot_s must be > 0")
    deadline = slot_s if t_deadline_s is None else t_deadline_s
    if not deadline > 0:
        raise ValueError("t_deadline_s must be > 0")
    if floor_mode not in FLOOR_MODES:
        raise ValueError(f"floor_mode must be one of {FLOOR_MODES}")

    a_coef = (state.payload_bits / cfg.bandwidth_hz) * LN2
    gain = comm_channel_gain(state, tx_angle_est, rx_angle_est, cfg)
    b_coef = gain / cfg.noise_comm
    if not b_coef > 0:
        raise InfeasibleError("beam mismatch leaves no usable channel gain")

    budget_s = min(slot_s, deadline)
    try:
        p_deadline = math.expm1(a_coef / budget_s) / b_coef
    except OverflowError:
        p_deadline = math.inf

    if floor_mode == "relaxed":
        p_sense = power_floor_relaxed(model, thr)
    else:
        p_sense = power_floor_exact(model, thr)

    return LinkCoefficients(a_coef=a_coef, b_coef=b_coef,
                            power_floor=max(p_deadline, p_sense),
                            vehicle_id=vehicle_id)
