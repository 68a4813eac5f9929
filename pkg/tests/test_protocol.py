"""Encoding tables and interferometer model.

The mixed-state intensity formula is cross-checked against squared
amplitudes of the pure-state propagation, which are derived
independently inside the module; agreement of the two routes is the
main correctness argument for the fringe model.
"""

import numpy as np
import pytest

from tempokey.errors import EstimationError, ValidationError
from tempokey.linalg import partial_trace
from tempokey.protocol import (
    INTERFEROMETER_DELAY,
    PORT_MINUS,
    PORT_PLUS,
    PROTOCOL_DIM,
    AliceSymbol,
    ProtocolKind,
    encode_pulse,
    interferometer_intensities,
    interferometer_output,
    joint_state,
    symbol_probabilities,
    visibility_from_counts,
)

S2 = 1 / np.sqrt(2)


class TestSymbolProbabilities:
    def test_ts3_uniform_bits(self):
        p = symbol_probabilities(ProtocolKind.TS3)
        assert p == {AliceSymbol.BIT0: 0.5, AliceSymbol.BIT1: 0.5}

    def test_ts3_rejects_fraction(self):
        with pytest.raises(ValidationError):
            symbol_probabilities(ProtocolKind.TS3, 0.5)

    def test_ts2_fixed_split(self):
        p = symbol_probabilities(ProtocolKind.TS2)
        assert p[AliceSymbol.BIT0] == 0.25
        assert p[AliceSymbol.BIT1] == 0.25
        assert p[AliceSymbol.COHERENCE] == 0.5
        assert symbol_probabilities(ProtocolKind.TS2, 0.5) == p

    def test_ts2_rejects_other_fraction(self):
        with pytest.raises(ValidationError):
            symbol_probabilities(ProtocolKind.TS2, 0.4)

    def test_c3ts_fraction(self):
        p = symbol_probabilities(ProtocolKind.C3TS, 0.8)
        assert p[AliceSymbol.BIT0] == pytest.approx(0.1)
        assert p[AliceSymbol.BIT1] == pytest.approx(0.1)
        assert p[AliceSymbol.COHERENCE] == pytest.approx(0.8)
        default = symbol_probabilities(ProtocolKind.C3TS)
        assert default[AliceSymbol.COHERENCE] == 0.5

    def test_c3ts_fraction_range(self):
        assert symbol_probabilities(ProtocolKind.C3TS, 0.0)[
            AliceSymbol.COHERENCE] == 0.0
        with pytest.raises(ValidationError):
            symbol_probabilities(ProtocolKind.C3TS, 1.0)
        with pytest.raises(ValidationError):
            symbol_probabilities(ProtocolKind.C3TS, -0.1)

    def test_always_normalised(self):
        for kind in ProtocolKind:
            assert sum(symbol_probabilities(kind).values()) == pytest.approx(
                1.0, abs=1e-15)


class TestEncodePulse:
    def test_ts3_bits_span_adjacent_slots(self):
        assert np.allclose(encode_pulse(ProtocolKind.TS3, AliceSymbol.BIT0),
                           [S2, S2, 0.0])
        assert np.allclose(encode_pulse(ProtocolKind.TS3, AliceSymbol.BIT1),
                           [0.0, S2, S2])

    def test_ts2_table(self):
        assert np.allclose(encode_pulse(ProtocolKind.TS2, AliceSymbol.BIT0),
                           [1.0, 0.0])
        assert np.allclose(encode_pulse(ProtocolKind.TS2, AliceSymbol.BIT1),
                           [0.0, 1.0])
        assert np.allclose(
            encode_pulse(ProtocolKind.TS2, AliceSymbol.COHERENCE), [S2, S2])

    def test_c3ts_table(self):
        assert np.allclose(encode_pulse(ProtocolKind.C3TS, AliceSymbol.BIT0),
                           [S2, S2, 0.0])
        assert np.allclose(
            encode_pulse(ProtocolKind.C3TS, AliceSymbol.COHERENCE),
            [S2, 0.0, S2])

    def test_all_normalised(self):
        for kind in ProtocolKind:
            for sym in AliceSymbol:
                try:
                    v = encode_pulse(kind, sym)
                except ValidationError:
                    continue
                assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_ts3_has_no_coherence_symbol(self):
        with pytest.raises(ValidationError):
            encode_pulse(ProtocolKind.TS3, AliceSymbol.COHERENCE)


class TestJointState:
    def test_exact_vectors(self):
        assert np.allclose(joint_state(ProtocolKind.TS3),
                           [0.5, 0.5, 0.0, 0.0, 0.5, 0.5])
        assert np.allclose(joint_state(ProtocolKind.TS2),
                           [S2, 0.0, 0.0, S2])
        assert np.allclose(joint_state(ProtocolKind.C3TS),
                           [S2, 0.0, 0.0, 0.0, 0.0, S2])

    def test_alice_marginal_is_balanced(self):
        for kind, dim in PROTOCOL_DIM.items():
            psi = joint_state(kind)
            rho = np.outer(psi, psi.conj())
            rho_a = partial_trace(rho, (2, dim), keep=0)
            assert np.allclose(np.diag(rho_a).real, [0.5, 0.5], atol=1e-12)


class TestInterferometer:
    def test_single_slot_splits_in_four(self):
        out = interferometer_output(np.array([1.0, 0.0]), 0.7)
        inten = np.abs(out) ** 2
        # Photon in slot 0 exits in slots 0 (direct) and 1 (delayed),
        # half in each port: four quarter-intensity outcomes.
        assert inten[0, PORT_PLUS] == pytest.approx(0.25)
        assert inten[0, PORT_MINUS] == pytest.approx(0.25)
        assert inten[1, PORT_PLUS] == pytest.approx(0.25)
        assert inten[1, PORT_MINUS] == pytest.approx(0.25)
        assert inten.sum() == pytest.approx(1.0)

    def test_fringe_on_coherent_pair(self):
        psi = np.array([S2, S2])
        for phase in (0.0, 0.5, np.pi / 2, np.pi, 2.5):
            inten = np.abs(interferometer_output(psi, phase)) ** 2
            assert inten[1, PORT_PLUS] == pytest.approx(
                (1 + np.cos(phase)) / 4, abs=1e-12)
            assert inten[1, PORT_MINUS] == pytest.approx(
                (1 - np.cos(phase)) / 4, abs=1e-12)

    def test_probability_conserved(self):
        rng = np.random.default_rng(201)
        for _ in range(10):
            amp = rng.normal(size=4) + 1j * rng.normal(size=4)
            amp /= np.linalg.norm(amp)
            for delay in (1, 2):
                out = interferometer_output(amp, rng.uniform(0, 2 * np.pi),
                                            delay=delay)
                assert np.sum(np.abs(out) ** 2) == pytest.approx(1.0,
                                                                 abs=1e-12)

    def test_intensities_match_pure_state_route(self):
        rng = np.random.default_rng(202)
        for _ in range(20):
            n = rng.integers(2, 5)
            amp = rng.normal(size=n) + 1j * rng.normal(size=n)
            amp /= np.linalg.norm(amp)
            phase = rng.uniform(0, 2 * np.pi)
            delay = int(rng.integers(1, 3))
            via_amplitudes = np.abs(interferometer_output(
                amp, phase, delay=delay)) ** 2
            via_density = interferometer_intensities(
                np.outer(amp, amp.conj()), phase, delay=delay)
            assert np.allclose(via_density, via_amplitudes, atol=1e-12)

    def test_mixed_state_trace_conserved(self):
        rng = np.random.default_rng(203)
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        rho = m @ m.conj().T
        rho /= np.trace(rho).real
        for delay in (1, 2):
            inten = interferometer_intensities(rho, 1.1, delay=delay)
            assert inten.shape == (3 + delay, 2)
            assert inten.sum() == pytest.approx(1.0, abs=1e-12)
            assert np.all(inten >= -1e-12)

    def test_mixture_loses_fringe(self):
        # Equal mixture of the two slots: no off-diagonal, no phase
        # dependence, unlike the coherent superposition above.
        rho = np.diag([0.5, 0.5]).astype(complex)
        i0 = interferometer_intensities(rho, 0.0)
        ipi = interferometer_intensities(rho, np.pi)
        assert np.allclose(i0, ipi, atol=1e-15)
        assert i0[1, PORT_PLUS] == pytest.approx(0.25)

    def test_protocol_delay_table(self):
        assert INTERFEROMETER_DELAY[ProtocolKind.TS3] == 1
        assert INTERFEROMETER_DELAY[ProtocolKind.TS2] == 1
        assert INTERFEROMETER_DELAY[ProtocolKind.C3TS] == 2

    def test_c3ts_outer_pair_needs_double_delay(self):
        psi = encode_pulse(ProtocolKind.C3TS, AliceSymbol.COHERENCE)
        rho = np.outer(psi, psi)
        # Delay 2 overlaps slots 0 and 2: full fringe at output slot 2.
        i0 = interferometer_intensities(rho, 0.0, delay=2)
        ipi = interferometer_intensities(rho, np.pi, delay=2)
        assert i0[2, PORT_PLUS] == pytest.approx(0.5)
        assert ipi[2, PORT_PLUS] == pytest.approx(0.0, abs=1e-12)
        # Delay 1 never overlaps them: no fringe anywhere.
        assert np.allclose(interferometer_intensities(rho, 0.0, delay=1),
                           interferometer_intensities(rho, np.pi, delay=1),
                           atol=1e-12)


class TestVisibilityFromCounts:
    def test_endpoints(self):
        assert visibility_from_counts(100, 0) == 1.0
        assert visibility_from_counts(0, 100) == 1.0
        assert visibility_from_counts(50, 50) == 0.0

    def test_intermediate(self):
        assert visibility_from_counts(75, 25) == pytest.approx(0.5)

    def test_rejects_no_counts(self):
        with pytest.raises(EstimationError):
            visibility_from_counts(0, 0)
