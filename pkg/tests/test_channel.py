"""Fiber/detector parameter bookkeeping."""

import numpy as np
import pytest

from tempokey.channel import (
    ChannelParams,
    bob_visibility,
    depolarize,
    qber,
    transmission,
)
from tempokey.errors import ValidationError


class TestChannelParams:
    def test_defaults(self):
        c = ChannelParams()
        assert c.alpha_db_per_km == 0.2
        assert c.eta_detector == 0.1
        assert c.p_dark == 1e-7
        assert c.q_a == 0.02
        assert c.v_a == 1.0
        assert c.length_km == 0.0

    def test_at_length(self):
        c = ChannelParams().at_length(42.0)
        assert c.length_km == 42.0
        assert c.eta_detector == 0.1

    def test_validation(self):
        with pytest.raises(ValidationError):
            ChannelParams(length_km=-1.0)
        with pytest.raises(ValidationError):
            ChannelParams(eta_detector=1.5)
        with pytest.raises(ValidationError):
            ChannelParams(q_a=-0.1)


class TestTransmission:
    def test_no_fiber_is_detector_only(self):
        assert transmission(ChannelParams(length_km=0.0)) == 0.1

    def test_ten_db_per_fifty_km(self):
        c = ChannelParams(alpha_db_per_km=0.2, length_km=50.0)
        assert transmission(c) == pytest.approx(0.01, rel=1e-12)

    def test_monotone_decreasing(self):
        etas = [transmission(ChannelParams(length_km=l))
                for l in np.linspace(0, 300, 31)]
        assert all(b < a for a, b in zip(etas, etas[1:]))


class TestQber:
    def test_direct_formula(self):
        c = ChannelParams(length_km=20.0)
        eta = transmission(c)
        want = (eta * c.q_a + c.p_dark) / (eta + 2 * c.p_dark)
        assert qber(c) == pytest.approx(want, abs=1e-15)

    def test_no_darks_gives_intrinsic_error(self):
        assert qber(ChannelParams(p_dark=0.0, length_km=123.0)) == \
            pytest.approx(0.02, abs=1e-15)

    def test_dark_dominated_limit_is_half(self):
        c = ChannelParams(eta_detector=0.0, p_dark=1e-6)
        assert qber(c) == pytest.approx(0.5, abs=1e-12)

    def test_dead_channel_is_half(self):
        assert qber(ChannelParams(eta_detector=0.0, p_dark=0.0)) == 0.5

    def test_increases_with_length(self):
        values = [qber(ChannelParams(length_km=l))
                  for l in np.linspace(0, 400, 21)]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert values[-1] < 0.5


class TestBobVisibility:
    def test_product_form(self):
        c = ChannelParams(length_km=50.0, v_a=0.9)
        assert bob_visibility(c) == pytest.approx(0.01 * 0.9, rel=1e-12)


class TestDepolarize:
    def test_identity_at_full_transmission(self):
        rho = np.array([[0.7, 0.2j], [-0.2j, 0.3]])
        assert np.allclose(depolarize(rho, 1.0), rho)

    def test_fully_mixed_at_zero(self):
        rho = np.array([[1.0, 0.0], [0.0, 0.0]])
        assert np.allclose(depolarize(rho, 0.0), np.eye(2) / 2)

    def test_trace_preserved_and_off_diagonal_scaled(self):
        rho = np.array([[0.5, 0.4], [0.4, 0.5]])
        out = depolarize(rho, 0.25)
        assert np.trace(out) == pytest.approx(1.0, abs=1e-14)
        assert out[0, 1] == pytest.approx(0.1, abs=1e-14)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValidationError):
            depolarize(np.eye(3) / 3, 0.5)
