"""Pulse encodings, joint states and the monitoring interferometer.

Three time-coding protocols are modelled.  TS3 encodes each bit in a
pair of adjacent time-slots out of three; TS2 uses single-slot bit
pulses plus dedicated two-slot coherence pulses; C3TS keeps the TS3 bit
encoding and adds coherence pulses spanning the two outer slots.

Slots are indexed from 0.  The unbalanced interferometer delays one arm
by `delay` slots, so an input over n slots interferes into n + delay
output slots on two ports (index 0 is the '+' port, 1 the '-' port).
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import EstimationError, ValidationError
from .linalg import ATOL_CONSTRUCTION, as_state_vector

_SQRT_HALF = 1.0 / np.sqrt(2.0)

PORT_PLUS = 0
PORT_MINUS = 1


class ProtocolKind(Enum):
    TS3 = "TS3"
    TS2 = "TS2"
    C3TS = "C3TS"


class AliceSymbol(Enum):
    BIT0 = "bit0"
    BIT1 = "bit1"
    COHERENCE = "coherence"


# Number of time-slots a single pulse occupies on Bob's side.
PROTOCOL_DIM = {
    ProtocolKind.TS3: 3,
    ProtocolKind.TS2: 2,
    ProtocolKind.C3TS: 3,
}

# Arm delay of the monitoring interferometer, in slots.  TS3 and TS2
# check the coherence of adjacent slots; C3TS coherence pulses span the
# outer slot pair, two slots apart.
INTERFEROMETER_DELAY = {
    ProtocolKind.TS3: 1,
    ProtocolKind.TS2: 1,
    ProtocolKind.C3TS: 2,
}

_ENCODINGS = {
    (ProtocolKind.TS3, AliceSymbol.BIT0): (_SQRT_HALF, _SQRT_HALF, 0.0),
    (ProtocolKind.TS3, AliceSymbol.BIT1): (0.0, _SQRT_HALF, _SQRT_HALF),
    (ProtocolKind.TS2, AliceSymbol.BIT0): (1.0, 0.0),
    (ProtocolKind.TS2, AliceSymbol.BIT1): (0.0, 1.0),
    (ProtocolKind.TS2, AliceSymbol.COHERENCE): (_SQRT_HALF, _SQRT_HALF),
    (ProtocolKind.C3TS, AliceSymbol.BIT0): (_SQRT_HALF, _SQRT_HALF, 0.0),
    (ProtocolKind.C3TS, AliceSymbol.BIT1): (0.0, _SQRT_HALF, _SQRT_HALF),
    (ProtocolKind.C3TS, AliceSymbol.COHERENCE): (_SQRT_HALF, 0.0, _SQRT_HALF),
}


def symbol_probabilities(protocol: ProtocolKind,
                         coherence_fraction: float | None = None) -> dict:
    """Sending probability for each symbol of a protocol.

    TS2 is fixed at (1/4, 1/4, 1/2) for (bit0, bit1, coherence).  C3TS
    accepts a configurable coherence fraction, default 1/2, the bits
    sharing the remainder evenly.  TS3 has no coherence symbol, so any
    explicit fraction is rejected.
    """
    if protocol is ProtocolKind.TS3:
        if coherence_fraction is not None:
            raise ValidationError("TS3 has no coherence symbol")
        return {AliceSymbol.BIT0: 0.5, AliceSymbol.BIT1: 0.5}
    if protocol is ProtocolKind.TS2:
        if coherence_fraction is not None and coherence_fraction != 0.5:
            raise ValidationError("TS2 sending probabilities are fixed")
        return {AliceSymbol.BIT0: 0.25, AliceSymbol.BIT1: 0.25,
                AliceSymbol.COHERENCE: 0.5}
    f = 0.5 if coherence_fraction is None else float(coherence_fraction)
    if not 0.0 <= f < 1.0:
        raise ValidationError(f"coherence fraction {f!r} outside [0, 1)")
    return {AliceSymbol.BIT0: (1.0 - f) / 2.0, AliceSymbol.BIT1: (1.0 - f) / 2.0,
            AliceSymbol.COHERENCE: f}


def encode_pulse(protocol: ProtocolKind, symbol: AliceSymbol) -> np.ndarray:
    """State vector Alice launches for `symbol` under `protocol`."""
    try:
        amps = _ENCODINGS[(protocol, symbol)]
    except KeyError:
        raise ValidationError(f"{symbol} is not a valid symbol of {protocol}") from None
    return np.asarray(amps, dtype=complex)


def joint_state(protocol: ProtocolKind) -> np.ndarray:
    """Entangled Alice-Bob state equivalent to the prepare-and-send run.

    Alice's register is a qubit (index a), Bob's a slot space of the
    protocol dimension (index b); entries are ordered a * dim_B + b.
    TS3 pairs Alice's bit with the corresponding two-slot pulse, TS2
    and C3TS pair it with the two key-carrying slots directly.
    """
    if protocol is ProtocolKind.TS3:
        b0 = encode_pulse(protocol, AliceSymbol.BIT0)
        b1 = encode_pulse(protocol, AliceSymbol.BIT1)
        return np.concatenate([b0, b1]) * _SQRT_HALF
    if protocol is ProtocolKind.TS2:
        psi = np.zeros(4, dtype=complex)
        psi[0] = psi[3] = _SQRT_HALF
        return psi
    psi = np.zeros(6, dtype=complex)
    psi[0] = psi[5] = _SQRT_HALF  # |0>|slot 0> + |1>|slot 2>
    return psi


def interferometer_output(state, phase: float, delay: int = 1) -> np.ndarray:
    """Output amplitudes of the unbalanced interferometer.

    Returns an (n + delay, 2) complex array indexed by (output slot,
    port), the delayed arm carrying the phase factor:

        out[k, +/-] = (a_k +/- e^{i phase} a_{k-delay}) / 2

    with amplitudes outside the input range read as zero.  Probability
    is conserved: the squared magnitudes sum to 1.
    """
    a = as_state_vector(state)
    delay = int(delay)
    if delay < 1:
        raise ValidationError(f"interferometer delay {delay} must be >= 1")
    n = a.size
    rot = np.exp(1j * float(phase))
    out = np.zeros((n + delay, 2), dtype=complex)
    for k in range(n + delay):
        direct = a[k] if k < n else 0.0
        delayed = rot * a[k - delay] if k - delay >= 0 else 0.0
        out[k, PORT_PLUS] = 0.5 * (direct + delayed)
        out[k, PORT_MINUS] = 0.5 * (direct - delayed)
    return out


def interferometer_intensities(rho, phase: float, delay: int = 1) -> np.ndarray:
    """Detection probabilities per (output slot, port) for a mixed input.

    `rho` is the pulse's density matrix over its n input slots.  For a
    pure state this reproduces |interferometer_output|^2 exactly; the
    mixed form is what the simulator samples from once the source
    coherence has been degraded.
    """
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0]
    if rho.shape != (n, n):
        raise ValidationError(f"density matrix must be square, got {rho.shape}")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > ATOL_CONSTRUCTION:
        raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
    delay = int(delay)
    if delay < 1:
        raise ValidationError(f"interferometer delay {delay} must be >= 1")
    rot = np.exp(1j * float(phase))
    out = np.zeros((n + delay, 2), dtype=float)
    for k in range(n + delay):
        direct = rho[k, k].real if k < n else 0.0
        delayed = rho[k - delay, k - delay].real if k - delay >= 0 else 0.0
        cross = rot * rho[k - delay, k] if 0 <= k - delay and k < n else 0.0
        out[k, PORT_PLUS] = 0.25 * (direct + delayed + 2.0 * np.real(cross))
        out[k, PORT_MINUS] = 0.25 * (direct + delayed - 2.0 * np.real(cross))
    return out


def visibility_from_counts(counts_at_phase_0: int, counts_at_phase_pi: int) -> float:
    """Fringe contrast |n0 - npi| / (n0 + npi) from two phase settings."""
    n0 = int(counts_at_phase_0)
    npi = int(counts_at_phase_pi)
    if n0 < 0 or npi < 0:
        raise ValidationError("counts must be nonnegative")
    total = n0 + npi
    if total == 0:
        raise EstimationError("no counts at the monitored output")
    return abs(n0 - npi) / total
