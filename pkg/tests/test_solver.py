"""Distance solving and sweeps.

Secure distance is cross-checked by a small bisection written here in
the test, driven only by the channel QBER and the threshold value, so
the module's bracketing logic answers to an independent root.
"""

import math

import numpy as np
import pytest

from tempokey.attack import max_qber
from tempokey.channel import ChannelParams, qber
from tempokey.errors import ValidationError
from tempokey.protocol import ProtocolKind
from tempokey.rates import SourceMode, rate_decoy, rate_single_photon
from tempokey.solver import (
    LENGTH_TOL_KM,
    CutoffResult,
    qber_sweep,
    rate_cutoff,
    secure_distance,
    sweep,
)


def _oracle_root(predicate, hi=2000.0):
    """Plain bisection on [0, hi]; assumes one sign change."""
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestCutoffResult:
    def test_unbounded_flag(self):
        assert CutoffResult.make_unbounded().unbounded
        assert not CutoffResult(length_km=10.0, bracket_width_km=0.05).unbounded


class TestSecureDistance:
    def test_against_in_test_bisection(self):
        c = ChannelParams()
        for kind, v_a in ((ProtocolKind.TS2, 1.0), (ProtocolKind.TS2, 0.9),
                          (ProtocolKind.TS3, 1.0)):
            threshold = max_qber(kind, v_a)
            ci = ChannelParams(v_a=v_a)
            want = _oracle_root(lambda l: qber(ci.at_length(l)) < threshold)
            got = secure_distance(kind, ci)
            assert not got.unbounded
            assert got.length_km == pytest.approx(want, abs=2 * LENGTH_TOL_KM)

    def test_bracket_invariant(self):
        c = ChannelParams()
        cut = secure_distance(ProtocolKind.TS2, c)
        threshold = max_qber(ProtocolKind.TS2, 1.0)
        assert qber(c.at_length(cut.length_km - cut.bracket_width_km)) < threshold
        assert qber(c.at_length(cut.length_km + cut.bracket_width_km)) >= threshold
        assert cut.bracket_width_km <= LENGTH_TOL_KM

    def test_unbounded_without_dark_counts(self):
        # Without darks the QBER stays at q_a forever, below threshold.
        cut = secure_distance(ProtocolKind.TS2, ChannelParams(p_dark=0.0))
        assert cut.unbounded
        assert math.isinf(cut.length_km)

    def test_zero_at_hopeless_channel(self):
        # q_a above threshold: insecure already at zero length.
        cut = secure_distance(ProtocolKind.TS2, ChannelParams(q_a=0.2))
        assert cut.length_km == 0.0


class TestRateCutoff:
    @pytest.mark.parametrize("source", list(SourceMode))
    def test_rate_sign_brackets_cutoff(self, source):
        c = ChannelParams()
        cut = rate_cutoff(source, ProtocolKind.TS2, c)
        assert not cut.unbounded
        rate_at = {
            SourceMode.SINGLE_PHOTON:
                lambda l: rate_single_photon(c.at_length(l), ProtocolKind.TS2),
            SourceMode.FAINT_DECOY: lambda l: rate_decoy(c.at_length(l), 0.5),
            SourceMode.FAINT_NO_DECOY: None,
        }[source]
        if rate_at is not None:
            assert rate_at(cut.length_km - cut.bracket_width_km) > 0.0
            assert rate_at(cut.length_km + cut.bracket_width_km) == 0.0

    def test_single_photon_matches_secure_distance(self):
        c = ChannelParams()
        via_rate = rate_cutoff(SourceMode.SINGLE_PHOTON, ProtocolKind.TS2, c)
        via_qber = secure_distance(ProtocolKind.TS2, c)
        assert via_rate.length_km == pytest.approx(via_qber.length_km,
                                                   abs=2 * LENGTH_TOL_KM)


class TestSweep:
    def test_grid_and_db_anchor(self):
        c = ChannelParams()
        curve = sweep(SourceMode.SINGLE_PHOTON, ProtocolKind.TS2, c,
                      0.0, 100.0, 25.0)
        assert curve.lengths_km == (0.0, 25.0, 50.0, 75.0, 100.0)
        assert all(r > 0 for r in curve.rates)
        assert curve.rates_db[0] == pytest.approx(0.0, abs=1e-12)
        assert all(b < a for a, b in zip(curve.rates_db, curve.rates_db[1:]))

    def test_nan_past_cutoff(self):
        c = ChannelParams()
        curve = sweep(SourceMode.FAINT_DECOY, ProtocolKind.TS2, c,
                      200.0, 260.0, 10.0)
        assert any(math.isnan(db) for db in curve.rates_db)
        for rate, db in zip(curve.rates, curve.rates_db):
            assert (rate > 0) == (not math.isnan(db))

    def test_validation(self):
        c = ChannelParams()
        with pytest.raises(ValidationError):
            sweep(SourceMode.FAINT_DECOY, ProtocolKind.TS2, c, 0.0, 10.0, 0.0)
        with pytest.raises(ValidationError):
            sweep(SourceMode.FAINT_DECOY, ProtocolKind.TS2, c, 10.0, 10.0, 1.0)
        with pytest.raises(ValidationError):
            sweep(SourceMode.FAINT_DECOY, ProtocolKind.TS2, c, -5.0, 10.0, 1.0)


class TestQberSweep:
    def test_shape_and_order(self):
        points = qber_sweep(ProtocolKind.TS2, [1.0, 0.9], [0.0, 0.05, 0.1])
        assert len(points) == 6
        assert [p.visibility_va for p in points] == [1.0] * 3 + [0.9] * 3
        assert [p.qber for p in points] == [0.0, 0.05, 0.1] * 2

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            qber_sweep(ProtocolKind.TS2, [], [0.1])
        with pytest.raises(ValidationError):
            qber_sweep(ProtocolKind.TS2, [1.0], [])
