"""Pulse-level simulation of the time-coding receiver.

Each pulse is followed through Alice's modulator, an optional
intercept-resend eavesdropper, the lossy fiber, and one of Bob's two
measurement arms: direct timing detection or the delay interferometer
that monitors coherence between occupied slots.  Arrival statistics are
accumulated as plain integer counters so results from different chunk
sizes and backends are exactly additive.

Model choices, fixed here and relied on by the comparison helpers:

* Timing arm: the photon survives with the line transmission, its slot
  is drawn from the encoded intensity profile, an intrinsic error flips
  the slot pattern end-for-end with probability `q_a`, and every slot
  may also fire from a dark count.  Only single-click pulses count.
* Interferometer arm: the pulse is represented by its density matrix
  with every off-diagonal scaled by transmission times source
  visibility, so the fringe at the overlap slot has visibility
  eta * V_A while the click total stays normalized.  Dark counts can
  fire in every output bin; single clicks at the monitored bin are
  tallied per phase setting.
* An intercept-resend attacker measures arrival time and resends the
  collapsed slot, which preserves every timing marginal but erases the
  off-diagonals the interferometer watches.

The compiled kernel is preferred when the extension built; the numpy
fallback implements identical semantics and either can be forced via
the `backend` argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import ChannelParams, bob_visibility, qber, transmission
from .errors import ValidationError
from .protocol import (
    PORT_PLUS,
    PROTOCOL_DIM,
    INTERFEROMETER_DELAY,
    AliceSymbol,
    ProtocolKind,
    encode_pulse,
    interferometer_intensities,
    symbol_probabilities,
)

try:
    from . import _mc_kernel as _default_backend
    USING_COMPILED_KERNEL = True
except ImportError:
    from . import _mc_fallback as _default_backend
    USING_COMPILED_KERNEL = False

from ._mc_fallback import (
    IDX_DETECTED,
    IDX_ERRORS,
    IDX_FLAGGED,
    IDX_HIST,
    IDX_IFACE_DOUBLE,
    IDX_SIFTED,
    IDX_TIME_DOUBLE,
)

_SEED_MAX = 2 ** 64 - 1
_Z_FLAG = 4.0

_SYMBOLS = {
    ProtocolKind.TS3: (AliceSymbol.BIT0, AliceSymbol.BIT1),
    ProtocolKind.TS2: (AliceSymbol.BIT0, AliceSymbol.BIT1,
                       AliceSymbol.COHERENCE),
    ProtocolKind.C3TS: (AliceSymbol.BIT0, AliceSymbol.BIT1,
                        AliceSymbol.COHERENCE),
}


class AttackKind(Enum):
    NONE = "none"
    INTERCEPT_RESEND = "intercept_resend"


@dataclass(frozen=True)
class SimConfig:
    protocol: ProtocolKind
    channel: ChannelParams = field(default_factory=ChannelParams)
    n_pulses: int = 1_000_000
    seed: int = 12345
    attack: AttackKind = AttackKind.NONE
    measure_coherence_prob: float = 0.5
    phases: tuple[float, ...] = (0.0, math.pi)
    coherence_fraction: float | None = None

    def __post_init__(self):
        if self.n_pulses <= 0:
            raise ValidationError(f"n_pulses={self.n_pulses!r} must be positive")
        if not 0 <= self.seed <= _SEED_MAX:
            raise ValidationError(f"seed={self.seed!r} outside 64-bit range")
        if not 0.0 <= self.measure_coherence_prob <= 1.0:
            raise ValidationError(
                f"measure_coherence_prob={self.measure_coherence_prob!r} "
                f"outside [0, 1]")
        if len(self.phases) == 0:
            raise ValidationError("phases must not be empty")
        if not all(math.isfinite(p) for p in self.phases):
            raise ValidationError("phases must be finite")
        if (self.coherence_fraction is not None
                and self.protocol is not ProtocolKind.C3TS):
            # symbol_probabilities enforces the per-protocol rules; fail
            # early on the one combination it would let through oddly.
            symbol_probabilities(self.protocol, self.coherence_fraction)


@dataclass(frozen=True)
class SimResult:
    sent: int
    detected_time_basis: int
    sifted: int
    errors: int
    double_clicks_time: int
    double_clicks_interferometer: int
    qber_estimate: float | None
    qber_se: float | None
    slot_histogram: tuple[int, ...]
    flagged_coherence_detections: int
    phase_counts: tuple[int, ...]
    visibility_estimate: float | None
    visibility_se: float | None

    def __post_init__(self):
        counts = (self.sent, self.detected_time_basis, self.sifted,
                  self.errors, self.double_clicks_time,
                  self.double_clicks_interferometer,
                  self.flagged_coherence_detections)
        if any(c < 0 for c in counts):
            raise ValidationError("negative counter")
        if not self.errors <= self.sifted <= self.detected_time_basis <= self.sent:
            raise ValidationError(
                f"counter ordering violated: errors={self.errors} "
                f"sifted={self.sifted} detected={self.detected_time_basis} "
                f"sent={self.sent}")
        if sum(self.slot_histogram) != self.detected_time_basis:
            raise ValidationError("slot histogram does not sum to detections")
        if sum(self.phase_counts) != self.flagged_coherence_detections:
            raise ValidationError("phase counts do not sum to flagged total")


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    simulated: float | None
    analytic: float
    z_score: float | None
    flagged: bool
    note: str = ""


@dataclass(frozen=True)
class _Tables:
    symbol_cum: np.ndarray      # (n_sym,) cumulative symbol priors
    diag_cum: np.ndarray        # (n_sym, n_slots) per-symbol slot cumulatives
    diag: np.ndarray            # (n_sym, n_slots) same, un-accumulated
    flip_map: np.ndarray        # (n_slots,) end-for-end slot mirror
    slot_bit: np.ndarray        # (n_slots,) decoded bit per slot, -1 ambiguous
    sym_bit: np.ndarray         # (n_sym,) encoded bit per symbol, -1 if none
    iface_cum: np.ndarray       # (n_sym + n_slots, n_phases, n_bins)
    monitored_bin: np.ndarray   # (n_sym,) fringe bin per symbol, -1 if none


def _build_tables(cfg: SimConfig) -> _Tables:
    symbols = _SYMBOLS[cfg.protocol]
    n_slots = PROTOCOL_DIM[cfg.protocol]
    delay = INTERFEROMETER_DELAY[cfg.protocol]
    n_sym = len(symbols)
    n_bins = 2 * (n_slots + delay)
    eta = transmission(cfg.channel)
    coherence_scale = eta * cfg.channel.v_a

    probs = symbol_probabilities(cfg.protocol, cfg.coherence_fraction)
    symbol_cum = np.cumsum([probs[s] for s in symbols])
    symbol_cum[-1] = 1.0

    vectors = [encode_pulse(cfg.protocol, s) for s in symbols]
    diag = np.array([np.abs(v) ** 2 for v in vectors])
    diag_cum = np.cumsum(diag, axis=1)
    diag_cum[:, -1] = 1.0

    # Mirror flip: swaps the outer slots, keeps the middle, and so
    # preserves every slot marginal the comparison rows predict.
    flip_map = np.arange(n_slots, dtype=np.int64)[::-1].copy()

    sym_bit = np.array(
        [{AliceSymbol.BIT0: 0, AliceSymbol.BIT1: 1}.get(s, -1) for s in symbols],
        dtype=np.int64)
    slot_bit = np.full(n_slots, -1, dtype=np.int64)
    for k in range(n_slots):
        owners = [b for b, s in enumerate(symbols[:2]) if diag[b][k] > 0.0]
        if len(owners) == 1:
            slot_bit[k] = owners[0]

    # Interferometer inputs: the n_sym encoded states (off-diagonals
    # scaled to eta * V_A) followed by the n_slots collapsed states an
    # intercept-resend attacker substitutes.
    states = []
    for v in vectors:
        rho = np.outer(v, v.conj())
        scaled = rho * coherence_scale
        np.fill_diagonal(scaled, np.diag(rho))
        states.append(scaled)
    for k in range(n_slots):
        rho = np.zeros((n_slots, n_slots), dtype=complex)
        rho[k, k] = 1.0
        states.append(rho)

    iface_cum = np.empty((n_sym + n_slots, len(cfg.phases), n_bins))
    for i, rho in enumerate(states):
        for p, phase in enumerate(cfg.phases):
            flat = interferometer_intensities(rho, phase, delay).reshape(-1)
            iface_cum[i, p] = np.cumsum(flat)
    iface_cum[:, :, -1] = 1.0

    monitored_bin = np.full(n_sym, -1, dtype=np.int64)
    for i, v in enumerate(vectors):
        occupied = np.flatnonzero(np.abs(v) > 0.0)
        if occupied.size == 2 and occupied[1] - occupied[0] == delay:
            monitored_bin[i] = 2 * occupied[1] + PORT_PLUS

    return _Tables(symbol_cum=symbol_cum, diag_cum=diag_cum, diag=diag,
                   flip_map=flip_map, slot_bit=slot_bit, sym_bit=sym_bit,
                   iface_cum=iface_cum, monitored_bin=monitored_bin)


def intercept_resend(protocol: ProtocolKind, symbol: AliceSymbol, u: float,
                     coherence_fraction: float | None = None) -> int:
    """Slot the attacker's timing measurement collapses `symbol` onto.

    `u` is the uniform deviate driving the collapse; the simulator feeds
    the same cumulative table, so this is the single place the attack's
    measurement statistics are defined.
    """
    if not 0.0 <= u < 1.0:
        raise ValidationError(f"u={u!r} outside [0, 1)")
    weights = np.abs(encode_pulse(protocol, symbol)) ** 2
    cum = np.cumsum(weights)
    cum[-1] = 1.0
    return int(np.searchsorted(cum, u, side="right"))


def _ratio_se(num: int, total: int) -> float:
    p = num / total
    return math.sqrt(p * (1.0 - p) / total)


def run_simulation(cfg: SimConfig, chunk_size: int = 1 << 18,
                   backend=None) -> SimResult:
    """Run the configured number of pulses and reduce to counters.

    Counter-based randomness makes the result a pure function of the
    seed: chunk size and backend choice change neither counts nor
    estimates.
    """
    if chunk_size <= 0:
        raise ValidationError(f"chunk_size={chunk_size!r} must be positive")
    kern = backend if backend is not None else _default_backend
    t = _build_tables(cfg)
    n_slots = t.diag_cum.shape[1]
    n_phases = len(cfg.phases)
    eta = transmission(cfg.channel)

    out = np.zeros(IDX_HIST + n_slots + n_phases, dtype=np.int64)
    symbol_cum = np.ascontiguousarray(t.symbol_cum, dtype=np.float64)
    diag_cum = np.ascontiguousarray(t.diag_cum, dtype=np.float64)
    iface_cum = np.ascontiguousarray(t.iface_cum, dtype=np.float64)

    start = 0
    while start < cfg.n_pulses:
        n = min(chunk_size, cfg.n_pulses - start)
        kern.simulate_chunk(start, n, cfg.seed,
                            int(cfg.attack is AttackKind.INTERCEPT_RESEND),
                            cfg.measure_coherence_prob, eta,
                            cfg.channel.q_a, cfg.channel.p_dark, n_phases,
                            symbol_cum, diag_cum, t.flip_map, t.slot_bit,
                            t.sym_bit, iface_cum, t.monitored_bin, out)
        start += n

    sifted = int(out[IDX_SIFTED])
    errors = int(out[IDX_ERRORS])
    qber_est = qber_se = None
    if sifted > 0:
        qber_est = errors / sifted
        qber_se = _ratio_se(errors, sifted)

    phase_counts = tuple(int(c) for c in out[IDX_HIST + n_slots:])
    vis_est = vis_se = None
    if n_phases >= 2 and sum(phase_counts) > 0:
        hi, lo = max(phase_counts), min(phase_counts)
        vis_est = (hi - lo) / (hi + lo)
        # Binomial error propagation through (hi-lo)/(hi+lo).
        vis_se = 2.0 * math.sqrt(hi * lo) / (hi + lo) ** 1.5

    return SimResult(
        sent=cfg.n_pulses,
        detected_time_basis=int(out[IDX_DETECTED]),
        sifted=sifted,
        errors=errors,
        double_clicks_time=int(out[IDX_TIME_DOUBLE]),
        double_clicks_interferometer=int(out[IDX_IFACE_DOUBLE]),
        qber_estimate=qber_est,
        qber_se=qber_se,
        slot_histogram=tuple(int(c) for c in out[IDX_HIST:IDX_HIST + n_slots]),
        flagged_coherence_detections=int(out[IDX_FLAGGED]),
        phase_counts=phase_counts,
        visibility_estimate=vis_est,
        visibility_se=vis_se,
    )


def _row(name: str, sim: float | None, ana: float,
         se: float | None) -> ComparisonRow:
    if sim is None:
        return ComparisonRow(name, None, ana, None, False,
                             note="insufficient data")
    if se is None or se == 0.0:
        z = 0.0 if sim == ana else math.inf
    else:
        z = (sim - ana) / se
    return ComparisonRow(name, sim, ana, z, abs(z) > _Z_FLAG)


def compare_to_analytic(result: SimResult, cfg: SimConfig) -> list[ComparisonRow]:
    """Check simulated estimates against the closed-form channel model.

    A row is flagged when the simulation sits more than 4 standard
    errors from the prediction, which is how an eavesdropper shows up:
    intercept-resend leaves every timing row alone and collapses the
    visibility row to zero.
    """
    t = _build_tables(cfg)
    probs = symbol_probabilities(cfg.protocol, cfg.coherence_fraction)
    symbols = _SYMBOLS[cfg.protocol]
    p_sym = np.array([probs[s] for s in symbols])

    rows = [_row("qber", result.qber_estimate, qber(cfg.channel),
                 result.qber_se),
            _row("visibility", result.visibility_estimate,
                 bob_visibility(cfg.channel), result.visibility_se)]

    marginal = p_sym @ t.diag
    marginal = ((1.0 - cfg.channel.q_a) * marginal
                + cfg.channel.q_a * marginal[t.flip_map])
    detected = result.detected_time_basis
    for k, expected in enumerate(marginal):
        name = f"slot_fraction_{k}"
        if detected == 0:
            rows.append(_row(name, None, float(expected), None))
            continue
        frac = result.slot_histogram[k] / detected
        rows.append(_row(name, frac, float(expected),
                         _ratio_se(result.slot_histogram[k], detected)))
    return rows
