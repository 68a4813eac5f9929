"""Vectorized numpy backend for the pulse simulator.

Mirrors `_mc_kernel.pyx` decision for decision.  Randomness is
counter-based (Philox-4x32-10): every decision of every pulse reads the
uniform at address (pulse index, draw index), so serial runs, chunked
runs and both backends see identical numbers.

Draw address map (must stay in sync with the compiled kernel):
  0 symbol   1 eavesdropper collapse   2 routing   3 survival
  4 time slot   5 intrinsic flip   6 phase choice   7 output bin
  8+b dark count in time-arm slot b   16+b dark count in output bin b

Counter layout in `out` (int64): 0 detected, 1 sifted, 2 errors,
3 time-arm double clicks, 4 interferometer double clicks, 5 monitored
coherence detections, then n_slots histogram bins, then one count per
phase setting at the monitored bin.
"""

from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK32 = 0xFFFFFFFF
_U53 = 2.0 ** -53

DRAW_SYMBOL = 0
DRAW_EVE = 1
DRAW_ROUTE = 2
DRAW_SURVIVE = 3
DRAW_TIME_SLOT = 4
DRAW_FLIP = 5
DRAW_PHASE = 6
DRAW_IFACE_BIN = 7
DRAW_TIME_DARK = 8
DRAW_IFACE_DARK = 16

IDX_DETECTED = 0
IDX_SIFTED = 1
IDX_ERRORS = 2
IDX_TIME_DOUBLE = 3
IDX_IFACE_DOUBLE = 4
IDX_FLAGGED = 5
IDX_HIST = 6


def _lo32(x: np.ndarray) -> np.ndarray:
    return (x & np.uint64(_MASK32)).astype(np.uint32)


def philox_words(c0, c1, c2, c3, key: int):
    """One Philox-4x32-10 block per lane; counters are uint32 arrays."""
    k0 = key & _MASK32
    k1 = (key >> 32) & _MASK32
    for _ in range(10):
        p0 = c0.astype(np.uint64) * _M0
        p1 = c2.astype(np.uint64) * _M1
        hi0, lo0 = _lo32(p0 >> np.uint64(32)), _lo32(p0)
        hi1, lo1 = _lo32(p1 >> np.uint64(32)), _lo32(p1)
        c0 = hi1 ^ c1 ^ np.uint32(k0)
        c1 = lo1
        c2 = hi0 ^ c3 ^ np.uint32(k1)
        c3 = lo0
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


def uniforms(seed: int, pulses: np.ndarray, draw: int) -> np.ndarray:
    """53-bit uniforms in [0, 1) addressed by (pulse index, draw index)."""
    c0 = np.full(pulses.shape, draw, dtype=np.uint32)
    c1 = _lo32(pulses)
    c2 = _lo32(pulses >> np.uint64(32))
    c3 = np.zeros(pulses.shape, dtype=np.uint32)
    w0, w1, _, _ = philox_words(c0, c1, c2, c3, seed)
    bits = (w1.astype(np.uint64) << np.uint64(32)) | w0.astype(np.uint64)
    return (bits >> np.uint64(11)).astype(np.float64) * _U53


def uniform_at(seed: int, pulse: int, draw: int) -> float:
    """Scalar convenience wrapper, mainly for tests."""
    return float(uniforms(seed, np.array([pulse], dtype=np.uint64), draw)[0])


def _pick(rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Smallest k with u < rows[:, k], rows being per-lane cumulatives."""
    return (u[:, None] >= rows).sum(axis=1).astype(np.int64)


def simulate_chunk(start: int, n: int, seed: int, attack: int, p_route: float,
                   eta: float, q_a: float, p_d: float, n_phases: int,
                   symbol_cum: np.ndarray, diag_cum: np.ndarray,
                   flip_map: np.ndarray, slot_bit: np.ndarray,
                   sym_bit: np.ndarray, iface_cum: np.ndarray,
                   monitored_bin: np.ndarray, out: np.ndarray) -> None:
    pulses = np.arange(start, start + n, dtype=np.uint64)
    n_sym = symbol_cum.shape[0]
    n_slots = diag_cum.shape[1]
    n_bins = iface_cum.shape[2]

    sym = np.searchsorted(symbol_cum, uniforms(seed, pulses, DRAW_SYMBOL),
                          side="right").astype(np.int64)
    collapsed = np.full(n, -1, dtype=np.int64)
    if attack:
        collapsed = _pick(diag_cum[sym], uniforms(seed, pulses, DRAW_EVE))
    route_iface = uniforms(seed, pulses, DRAW_ROUTE) < p_route

    # Time arm: survival, slot draw (or the collapsed slot), intrinsic
    # flip, then one dark-count draw per slot; single clicks survive.
    survive = uniforms(seed, pulses, DRAW_SURVIVE) < eta
    pslot = _pick(diag_cum[sym], uniforms(seed, pulses, DRAW_TIME_SLOT))
    pslot = np.where(collapsed >= 0, collapsed, pslot)
    flip = uniforms(seed, pulses, DRAW_FLIP) < q_a
    pslot = np.where(flip, flip_map[pslot], pslot)
    pslot = np.where(survive, pslot, -1)

    clicks = np.zeros(n, dtype=np.int64)
    cslot = np.zeros(n, dtype=np.int64)
    for b in range(n_slots):
        hit = (uniforms(seed, pulses, DRAW_TIME_DARK + b) < p_d) | (pslot == b)
        clicks += hit
        cslot = np.where(hit, b, cslot)
    time_arm = ~route_iface
    detected = time_arm & (clicks == 1)
    sifted = detected & (slot_bit[cslot] >= 0) & (sym_bit[sym] >= 0)
    errors = sifted & (slot_bit[cslot] != sym_bit[sym])

    out[IDX_DETECTED] += int(detected.sum())
    out[IDX_SIFTED] += int(sifted.sum())
    out[IDX_ERRORS] += int(errors.sum())
    out[IDX_TIME_DOUBLE] += int((time_arm & (clicks >= 2)).sum())
    out[IDX_HIST:IDX_HIST + n_slots] += np.bincount(cslot[detected],
                                                    minlength=n_slots)

    # Interferometer arm: phase setting, output bin from the state's
    # cumulative intensities, dark counts per bin.
    ph = np.minimum((uniforms(seed, pulses, DRAW_PHASE) * n_phases).astype(np.int64),
                    n_phases - 1)
    state = np.where(collapsed >= 0, n_sym + collapsed, sym)
    pbin = _pick(iface_cum[state, ph], uniforms(seed, pulses, DRAW_IFACE_BIN))
    clicks = np.zeros(n, dtype=np.int64)
    cbin = np.zeros(n, dtype=np.int64)
    for b in range(n_bins):
        hit = (uniforms(seed, pulses, DRAW_IFACE_DARK + b) < p_d) | (pbin == b)
        clicks += hit
        cbin = np.where(hit, b, cbin)
    idetected = route_iface & (clicks == 1)
    monitored = idetected & (monitored_bin[sym] >= 0) & (cbin == monitored_bin[sym])

    out[IDX_IFACE_DOUBLE] += int((route_iface & (clicks >= 2)).sum())
    out[IDX_FLAGGED] += int(monitored.sum())
    out[IDX_HIST + n_slots:IDX_HIST + n_slots + n_phases] += np.bincount(
        ph[monitored], minlength=n_phases)
