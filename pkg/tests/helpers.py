"""Shared builders for the test suite."""

import numpy as np

from dfrc_minmax import (ArrayConfig, LinkCoefficients, PcrbModel,
                         PcrbThresholds, RoadScenario, VehicleSpec,
                         VehicleState)

DEFAULT_PCRB = dict(b1_sq=[4e-4, 3e-4, 2e-4, 1e-4],
                    b2_sq=[0.5, 0.25, 0.15, 0.1],
                    eigs=[80.0, 40.0, 15.0, 5.0])


def make_cfg(**overrides):
    base = dict(n_tx=64, n_rx=64, n_veh=4, carrier_hz=30e9, bandwidth_hz=400e6,
                noise_comm=0.0025, noise_radar=0.0025, alpha_const=1.0)
    base.update(overrides)
    return ArrayConfig(**base)


def make_state(angle=1.2, dist=50.0, speed=20.0, payload=4000.0):
    return VehicleState(angle_rad=angle, dist_m=dist, speed_mps=speed,
                        radar_coeff=complex(1.0 / dist ** 2),
                        payload_bits=payload)


def make_model(**overrides):
    fields = dict(DEFAULT_PCRB)
    fields.update(overrides)
    return PcrbModel(**fields)


def links_of(a, b, floors=None):
    floors = floors if floors is not None else [0.0] * len(b)
    return [LinkCoefficients(a_coef=float(ai), b_coef=float(bi),
                             power_floor=float(fi), vehicle_id=k)
            for k, (ai, bi, fi) in enumerate(zip(a, b, floors))]


def make_scenario(**overrides):
    """The four-vehicle reference road used across scenario/CLI tests."""
    model = make_model()
    vehicles = tuple(
        VehicleSpec(position_m=x, speed_mps=v, payload_bits=4000.0, pcrb=model)
        for x, v in [(-70.0, 22.0), (-40.0, 20.0), (25.0, 18.0), (55.0, 24.0)])
    base = dict(rsu_offset_m=4.0, slot_s=0.01, n_slots=5, vehicles=vehicles,
                p_max=1.0, thresholds=PcrbThresholds(xi_theta=1.5e-3, xi_dist=1.0),
                arrays=make_cfg(), deadline_s=0.01, predict_noise_std_rad=0.0,
                seed=1)
    base.update(overrides)
    return RoadScenario(**base)


def random_pd_pair(rng, scale=1.0):
    """A random Hermitian PD prior and Hermitian PSD observed Fisher pair."""
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    prior = a @ a.conj().T + 0.1 * np.eye(4)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    observed = (g @ g.conj().T) * scale
    return prior, observed
