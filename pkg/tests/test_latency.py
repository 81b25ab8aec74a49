"""Rate, delay, and link-coefficient assembly."""

import math

import numpy as np
import pytest

from dfrc_minmax import (LinkCoefficients, PcrbThresholds, delay, make_link,
                         power_floor_exact, power_floor_relaxed, rate)
from helpers import make_cfg, make_model, make_state

SLACK_THR = PcrbThresholds(xi_theta=10.0, xi_dist=10.0)


class TestRate:
    def test_zero_power_zero_rate(self):
        assert rate(0.0, 3.0, 400e6) == 0.0

    def test_unit_snr_doubles(self):
        assert rate(0.5, 2.0, 400e6) == pytest.approx(4.0e8, rel=1e-12)

    def test_direct_evaluation(self):
        assert rate(7.0, 3.0, 400e6) == pytest.approx(400e6 * math.log2(22.0), rel=1e-12)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            rate(-1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            rate(1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            rate(1.0, 1.0, 0.0)


class TestDelay:
    def test_unit_delay(self):
        link = LinkCoefficients(a_coef=math.log(2.0), b_coef=1.0, power_floor=0.0)
        assert delay(1.0, link) == pytest.approx(1.0, rel=1e-15)

    def test_cross_check_with_payload_over_rate(self):
        payload, bandwidth, b_coef, p = 400e6, 400e6, 4.0, 0.25
        link = LinkCoefficients(a_coef=(payload / bandwidth) * math.log(2.0),
                                b_coef=b_coef, power_floor=0.0)
        assert delay(p, link) == pytest.approx(1.0, rel=1e-12)
        assert delay(p, link) == pytest.approx(payload / rate(p, b_coef, bandwidth),
                                               rel=1e-12)

    def test_two_formulas_agree_on_random_inputs(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            payload = float(rng.uniform(1e2, 1e9))
            bandwidth = float(rng.uniform(1e5, 1e9))
            b_coef = float(rng.uniform(1e-3, 1e3))
            p = float(rng.uniform(1e-6, 1e3))
            link = LinkCoefficients(a_coef=(payload / bandwidth) * math.log(2.0),
                                    b_coef=b_coef, power_floor=0.0)
            via_rate = payload / rate(p, b_coef, bandwidth)
            assert delay(p, link) == pytest.approx(via_rate, rel=1e-12)

    def test_product_of_delay_and_rate_is_payload(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            payload = float(rng.uniform(1e3, 1e7))
            bandwidth = float(rng.uniform(1e6, 1e9))
            b_coef = float(rng.uniform(0.01, 100.0))
            p = float(rng.uniform(1e-4, 100.0))
            link = LinkCoefficients(a_coef=(payload / bandwidth) * math.log(2.0),
                                    b_coef=b_coef, power_floor=0.0)
            assert delay(p, link) * rate(p, b_coef, bandwidth) == pytest.approx(
                payload, rel=1e-12)

    def test_monotone_decreasing(self):
        rng = np.random.default_rng(10)
        link = LinkCoefficients(a_coef=0.7, b_coef=3.0, power_floor=0.0)
        for _ in range(100):
            p1 = float(rng.uniform(1e-6, 10.0))
            p2 = p1 * float(rng.uniform(1.01, 5.0))
            assert delay(p2, link) < delay(p1, link)

    def test_rejects_nonpositive_power(self):
        link = LinkCoefficients(a_coef=1.0, b_coef=1.0, power_floor=0.0)
        with pytest.raises(ValueError):
            delay(0.0, link)
        with pytest.raises(ValueError):
            delay(-1.0, link)


class TestMakeLink:
    def test_unconstrained_link_has_zero_floor(self):
        cfg = make_cfg()
        state = make_state(angle=1.3, dist=30.0)
        exact = make_link(state, state.angle_rad, state.angle_rad, cfg,
                          make_model(), SLACK_THR, slot_s=1e6, t_deadline_s=1e6,
                          floor_mode="exact")
        assert exact.power_floor == pytest.approx(0.0, abs=1e-9)
        very_slack = PcrbThresholds(xi_theta=1e9, xi_dist=1e9)
        relaxed = make_link(state, state.angle_rad, state.angle_rad, cfg,
                            make_model(), very_slack, slot_s=1e6, t_deadline_s=1e6)
        assert relaxed.power_floor == pytest.approx(0.0, abs=1e-9)

    def test_deadline_floor_exact_value(self):
        # a = ln 2, b = 1, one-second budget: the floor is e^{ln 2} - 1 = 1 W.
        cfg = make_cfg(n_tx=1, n_rx=1, n_veh=1, bandwidth_hz=400e6, noise_comm=1.0)
        state = make_state(angle=math.pi / 2, dist=1.0, payload=400e6)
        link = make_link(state, state.angle_rad, state.angle_rad, cfg,
                         make_model(), SLACK_THR, slot_s=1.0)
        assert link.a_coef == pytest.approx(math.log(2.0), rel=1e-15)
        assert link.b_coef == pytest.approx(1.0, rel=1e-10)
        assert link.power_floor == pytest.approx(1.0, rel=1e-12)

    def test_deadline_floor_is_tight(self):
        rng = np.random.default_rng(11)
        cfg = make_cfg()
        for _ in range(50):
            dist = float(rng.uniform(10.0, 150.0))
            angle = float(rng.uniform(0.3, math.pi - 0.3))
            payload = float(rng.uniform(1e3, 1e6))
            slot = float(rng.uniform(1e-4, 1e-1))
            deadline = float(rng.uniform(1e-4, 1e-1))
            state = make_state(angle=angle, dist=dist, payload=payload)
            link = make_link(state, angle, angle, cfg, make_model(), SLACK_THR,
                             slot_s=slot, t_deadline_s=deadline)
            budget = min(slot, deadline)
            deadline_floor = math.expm1(link.a_coef / budget) / link.b_coef
            if link.power_floor == pytest.approx(deadline_floor, rel=1e-12):
                assert delay(link.power_floor, link) <= budget + 1e-9
                assert delay(link.power_floor, link) == pytest.approx(budget, rel=1e-9)

    def test_b_coef_with_perfect_estimates(self):
        cfg = make_cfg()
        state = make_state(angle=1.0, dist=80.0)
        link = make_link(state, state.angle_rad, state.angle_rad, cfg,
                         make_model(), SLACK_THR, slot_s=0.01)
        expected = cfg.n_tx * cfg.n_veh * cfg.alpha_const ** 2 / (
            state.dist_m ** 2 * cfg.noise_comm)
        assert link.b_coef == pytest.approx(expected, rel=1e-10)

    def test_floor_modes_pick_their_pcrb_floor(self):
        cfg = make_cfg()
        state = make_state(angle=1.2, dist=40.0)
        model = make_model()
        thr = PcrbThresholds(xi_theta=1.5e-3, xi_dist=1.0)
        relaxed = make_link(state, 1.2, 1.2, cfg, model, thr, slot_s=0.01,
                            floor_mode="relaxed")
        exact = make_link(state, 1.2, 1.2, cfg, model, thr, slot_s=0.01,
                          floor_mode="exact")
        deadline_floor = math.expm1(relaxed.a_coef / 0.01) / relaxed.b_coef
        assert relaxed.power_floor == pytest.approx(
            max(deadline_floor, power_floor_relaxed(model, thr)), rel=1e-12)
        assert exact.power_floor == pytest.approx(
            max(deadline_floor, power_floor_exact(model, thr)), rel=1e-9)
        assert exact.power_floor <= relaxed.power_floor

    def test_deadline_defaults_to_slot(self):
        cfg = make_cfg()
        state = make_state()
        with_default = make_link(state, 1.2, 1.2, cfg, make_model(), SLACK_THR,
                                 slot_s=0.01)
        explicit = make_link(state, 1.2, 1.2, cfg, make_model(), SLACK_THR,
                             slot_s=0.01, t_deadline_s=0.01)
        assert with_default.power_floor == explicit.power_floor

    def test_rejects_unknown_floor_mode(self):
        with pytest.raises(ValueError):
            make_link(make_state(), 1.2, 1.2, make_cfg(), make_model(),
                      SLACK_THR, slot_s=0.01, floor_mode="loose")

    def test_impossible_deadline_gives_infinite_floor(self):
        cfg = make_cfg()
        state = make_state(dist=140.0, payload=1e9)
        link = make_link(state, state.angle_rad, state.angle_rad, cfg,
                         make_model(), SLACK_THR, slot_s=1e-9)
        assert math.isinf(link.power_floor)


class TestLinkCoefficients:
    def test_invariants(self):
        with pytest.raises(ValueError):
            LinkCoefficients(a_coef=0.0, b_coef=1.0, power_floor=0.0)
        with pytest.raises(ValueError):
            LinkCoefficients(a_coef=1.0, b_coef=0.0, power_floor=0.0)
        with pytest.raises(ValueError):
            LinkCoefficients(a_coef=1.0, b_coef=1.0, power_floor=-1.0)
