# cython: language_level=3
"""Compiled scalar backend for the pulse simulator.

Semantics are pinned to `_mc_fallback.py`: same Philox-4x32-10 counter
scheme, same draw addresses, same counter layout in `out`.  Any change
here must be mirrored there, and the cross-backend equality test keeps
both honest.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint32_t, uint64_t

cnp.import_array()

cdef uint32_t M0 = 0xD2511F53u
cdef uint32_t M1 = 0xCD9E8D57u
cdef uint32_t W0 = 0x9E3779B9u
cdef uint32_t W1 = 0xBB67AE85u
cdef double U53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _philox_bits(uint32_t c0, uint32_t c1, uint32_t c2,
                                  uint32_t c3, uint32_t k0, uint32_t k1) nogil:
    cdef uint64_t p0, p1
    cdef uint32_t hi0, lo0, hi1, lo1
    cdef int r
    for r in range(10):
        p0 = (<uint64_t>c0) * (<uint64_t>M0)
        p1 = (<uint64_t>c2) * (<uint64_t>M1)
        hi0 = <uint32_t>(p0 >> 32)
        lo0 = <uint32_t>p0
        hi1 = <uint32_t>(p1 >> 32)
        lo1 = <uint32_t>p1
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = k0 + W0
        k1 = k1 + W1
    return ((<uint64_t>c1) << 32) | (<uint64_t>c0)


cdef inline double _uniform(uint64_t seed, uint64_t pulse, uint32_t draw) nogil:
    cdef uint64_t bits = _philox_bits(draw, <uint32_t>pulse,
                                      <uint32_t>(pulse >> 32), 0u,
                                      <uint32_t>seed, <uint32_t>(seed >> 32))
    return (<double>(bits >> 11)) * U53


cdef inline Py_ssize_t _pick1(const double[::1] row, double u) nogil:
    cdef Py_ssize_t k = 0, m = row.shape[0]
    while k < m - 1 and u >= row[k]:
        k += 1
    return k


cdef inline Py_ssize_t _pick2(const double[:, ::1] rows, Py_ssize_t r,
                              double u) nogil:
    cdef Py_ssize_t k = 0, m = rows.shape[1]
    while k < m - 1 and u >= rows[r, k]:
        k += 1
    return k


cdef inline Py_ssize_t _pick3(const double[:, :, ::1] rows, Py_ssize_t r,
                              Py_ssize_t p, double u) nogil:
    cdef Py_ssize_t k = 0, m = rows.shape[2]
    while k < m - 1 and u >= rows[r, p, k]:
        k += 1
    return k


def philox_words(c0, c1, c2, c3, key):
    """Single Philox block, returned as four words; test hook."""
    cdef uint32_t x0 = c0, x1 = c1, x2 = c2, x3 = c3
    cdef uint32_t k0 = <uint32_t>(<uint64_t>key)
    cdef uint32_t k1 = <uint32_t>((<uint64_t>key) >> 32)
    cdef uint64_t p0, p1
    cdef uint32_t hi0, lo0, hi1, lo1
    cdef int r
    for r in range(10):
        p0 = (<uint64_t>x0) * (<uint64_t>M0)
        p1 = (<uint64_t>x2) * (<uint64_t>M1)
        hi0 = <uint32_t>(p0 >> 32)
        lo0 = <uint32_t>p0
        hi1 = <uint32_t>(p1 >> 32)
        lo1 = <uint32_t>p1
        x0 = hi1 ^ x1 ^ k0
        x1 = lo1
        x2 = hi0 ^ x3 ^ k1
        x3 = lo0
        k0 = k0 + W0
        k1 = k1 + W1
    return int(x0), int(x1), int(x2), int(x3)


def uniform_at(seed, pulse, draw):
    """Scalar uniform at one (pulse, draw) address; test hook."""
    return _uniform(<uint64_t>seed, <uint64_t>pulse, <uint32_t>draw)


def simulate_chunk(start, n, seed, attack, p_route, eta, q_a, p_d, n_phases,
                   const double[::1] symbol_cum not None,
                   const double[:, ::1] diag_cum not None,
                   const int64_t[::1] flip_map not None,
                   const int64_t[::1] slot_bit not None,
                   const int64_t[::1] sym_bit not None,
                   const double[:, :, ::1] iface_cum not None,
                   const int64_t[::1] monitored_bin not None,
                   int64_t[::1] out not None):
    cdef uint64_t start_u = start, seed_u = seed, pulse
    cdef Py_ssize_t n_c = n, i, b, sym, collapsed, slot, cslot, cbin, ph, state
    cdef Py_ssize_t pbin, n_slots = diag_cum.shape[1]
    cdef Py_ssize_t n_sym = symbol_cum.shape[0], n_bins = iface_cum.shape[2]
    cdef Py_ssize_t n_ph = n_phases
    cdef bint attack_c = attack
    cdef double p_route_c = p_route, eta_c = eta, q_a_c = q_a, p_d_c = p_d
    cdef int clicks

    with nogil:
        for i in range(n_c):
            pulse = start_u + <uint64_t>i
            sym = _pick1(symbol_cum, _uniform(seed_u, pulse, 0u))
            collapsed = -1
            if attack_c:
                collapsed = _pick2(diag_cum, sym, _uniform(seed_u, pulse, 1u))
            if _uniform(seed_u, pulse, 2u) >= p_route_c:
                # Time arm.
                if collapsed >= 0:
                    slot = collapsed
                else:
                    slot = _pick2(diag_cum, sym, _uniform(seed_u, pulse, 4u))
                if _uniform(seed_u, pulse, 5u) < q_a_c:
                    slot = flip_map[slot]
                if _uniform(seed_u, pulse, 3u) >= eta_c:
                    slot = -1
                clicks = 0
                cslot = 0
                for b in range(n_slots):
                    if _uniform(seed_u, pulse, <uint32_t>(8 + b)) < p_d_c or slot == b:
                        clicks += 1
                        cslot = b
                if clicks == 1:
                    out[0] += 1
                    out[6 + cslot] += 1
                    if slot_bit[cslot] >= 0 and sym_bit[sym] >= 0:
                        out[1] += 1
                        if slot_bit[cslot] != sym_bit[sym]:
                            out[2] += 1
                elif clicks >= 2:
                    out[3] += 1
            else:
                # Interferometer arm.
                ph = <Py_ssize_t>(_uniform(seed_u, pulse, 6u) * n_ph)
                if ph >= n_ph:
                    ph = n_ph - 1
                if collapsed >= 0:
                    state = n_sym + collapsed
                else:
                    state = sym
                pbin = _pick3(iface_cum, state, ph, _uniform(seed_u, pulse, 7u))
                clicks = 0
                cbin = 0
                for b in range(n_bins):
                    if _uniform(seed_u, pulse, <uint32_t>(16 + b)) < p_d_c or pbin == b:
                        clicks += 1
                        cbin = b
                if clicks == 1:
                    if monitored_bin[sym] >= 0 and cbin == monitored_bin[sym]:
                        out[5] += 1
                        out[6 + n_slots + ph] += 1
                elif clicks >= 2:
                    out[4] += 1
