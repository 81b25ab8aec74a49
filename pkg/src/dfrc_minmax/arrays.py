"""Array responses and channel gains for the mmWave link between RSU and vehicles.

Both ends carry half-wavelength uniform linear arrays.  Every power-gain
computation here drops unit-modulus phasors (Doppler, carrier phase): the
rate formula downstream consumes squared magnitudes only.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0  # m/s


@dataclass(frozen=True)
class ArrayConfig:
    """Antenna counts, carrier, bandwidth and noise powers of one deployment.

    noise_comm / noise_radar are linear-scale variances; alpha_const is the
    dimensionless constant in the large-scale path gain alpha_const / d.
    """

    n_tx: int
    n_rx: int
    n_veh: int
    carrier_hz: float
    bandwidth_hz: float
    noise_comm: float
    noise_radar: float
    alpha_const: float = 1.0

    def __post_init__(self):
        for name in ("n_tx", "n_rx", "n_veh"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive antenna count")
        for name in ("carrier_hz", "bandwidth_hz", "noise_comm", "noise_radar",
                     "alpha_const"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class VehicleState:
    """One vehicle's kinematic state and pending payload at a single slot."""

    angle_rad: float
    dist_m: float
    speed_mps: float
    radar_coeff: complex
    payload_bits: float

    def __post_init__(self):
        if not 0.0 < self.angle_rad < math.pi:
            raise ValueError("angle_rad must lie strictly inside (0, pi)")
        if not self.dist_m > 0:
            raise ValueError("dist_m must be > 0")
        if not self.payload_bits > 0:
            raise ValueError("payload_bits must be > 0")


def steering_vector(angle_rad: float, n: int) -> np.ndarray:
    """Unit-norm ULA response; element m is sqrt(1/n) * exp(-j*m*pi*cos(angle))."""
    if n < 1:
        raise ValueError("array size n must be >= 1")
    if not 0.0 < angle_rad < math.pi:
        raise ValueError("angle_rad must lie strictly inside (0, pi)")
    phases = -1j * math.pi * math.cos(angle_rad) * np.arange(n)
    return np.exp(phases) / math.sqrt(n)


def large_scale_gain(dist_m: float, cfg: ArrayConfig) -> complex:
    """Large-scale fading factor alpha_const/d * exp(j*2*pi*f_c*d/c)."""
    if not dist_m > 0:
        raise ValueError("dist_m must be > 0")
    phase = 2.0 * math.pi * cfg.carrier_hz * dist_m / SPEED_OF_LIGHT
    return (cfg.alpha_const / dist_m) * cmath.exp(1j * phase)


def comm_channel_gain(true_state: VehicleState, tx_angle_est: float,
                      rx_angle_est: float, cfg: ArrayConfig) -> float:
    """Downlink power gain N_t*N_v*|w^H H u|^2 under matched-filter beams.

    H is the rank-one downlink channel at the vehicle's true angle; u and w
    are the steering vectors at the estimated transmit/receive angles.  The
    unit-modulus Doppler phasor does not affect the squared magnitude and is
    excluded.
    """
    alpha = large_scale_gain(true_state.dist_m, cfg)
    v_true = steering_vector(true_state.angle_rad, cfg.n_veh)
    a_true = steering_vector(true_state.angle_rad, cfg.n_tx)
    channel = alpha * np.outer(v_true, a_true.conj())
    u = steering_vector(tx_angle_est, cfg.n_tx)
    w = steering_vector(rx_angle_est, cfg.n_veh)
    amplitude = w.conj() @ channel @ u
    return cfg.n_tx * cfg.n_veh * float(abs(amplitude)) ** 2


def doppler_shift_comm(state: VehicleState, cfg: ArrayConfig) -> float:
    """One-way Doppler shift v*cos(theta)*f_c/c in Hz."""
    return state.speed_mps * math.cos(state.angle_rad) * cfg.carrier_hz / SPEED_OF_LIGHT


def doppler_shift_radar(state: VehicleState, cfg: ArrayConfig) -> float:
    """Round-trip Doppler shift, twice the one-way value."""
    return 2.0 * doppler_shift_comm(state, cfg)


def echo_delay(state: VehicleState) -> float:
    """Round-trip propagation delay 2*d/c in seconds."""
    return 2.0 * state.dist_m / SPEED_OF_LIGHT
