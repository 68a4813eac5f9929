"""Secure distances and rate-vs-distance curves.

Cut-offs are located by predicate bisection: the rate functions are
clamped at zero, so the solver brackets the largest length with a
strictly positive value instead of hunting for a sign change.  The
bracket starts at [0, 100] km and doubles geometrically; anything still
positive at 10,000 km is reported as unbounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import channel as _channel
from . import rates as _rates
from .attack import SecurityPoint, max_qber, secret_rate
from .errors import ValidationError
from .protocol import ProtocolKind

# Bisection stops once the bracket is this narrow, in km.
LENGTH_TOL_KM = 0.1
# Beyond this length the cut-off is reported as unbounded.
MAX_LENGTH_KM = 10_000.0


@dataclass(frozen=True)
class CutoffResult:
    """Largest secure length, or unbounded when no cut-off exists.

    When bounded, the underlying quantity is positive at
    length_km - bracket_width_km and zero (clamped) at
    length_km + bracket_width_km.
    """

    length_km: float
    bracket_width_km: float

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.length_km)

    @classmethod
    def make_unbounded(cls) -> "CutoffResult":
        return cls(length_km=math.inf, bracket_width_km=math.nan)


@dataclass(frozen=True)
class RateCurve:
    """Rate samples over a distance grid, with dB normalisation.

    rate_db is 10 log10(rate / rate_ref), anchored at the first grid
    point with positive rate; entries without a positive rate are NaN.
    """

    protocol: ProtocolKind
    source: _rates.SourceMode
    lengths_km: tuple
    rates: tuple
    rates_db: tuple


def _bisect_cutoff(positive_at: Callable[[float], bool]) -> CutoffResult:
    """Largest L with positive_at(L), assuming monotone decay."""
    if not positive_at(0.0):
        return CutoffResult(length_km=0.0, bracket_width_km=0.0)
    lo, hi = 0.0, 100.0
    while positive_at(hi):
        lo = hi
        hi *= 2.0
        if hi > MAX_LENGTH_KM:
            if positive_at(MAX_LENGTH_KM):
                return CutoffResult.make_unbounded()
            hi = MAX_LENGTH_KM
            break
    while hi - lo > LENGTH_TOL_KM:
        mid = 0.5 * (lo + hi)
        if positive_at(mid):
            lo = mid
        else:
            hi = mid
    return CutoffResult(length_km=0.5 * (lo + hi), bracket_width_km=0.5 * (hi - lo))


def secure_distance(protocol: ProtocolKind, c: _channel.ChannelParams) -> CutoffResult:
    """Largest length whose QBER stays below the protocol threshold.

    The channel parameters are taken at length 0 and swept; a source
    already at or above threshold gives length 0, and a channel whose
    QBER never reaches threshold (say, no dark counts) is unbounded.
    """
    threshold = max_qber(protocol, c.v_a)
    return _bisect_cutoff(lambda length: _channel.qber(c.at_length(length)) < threshold)


def _rate_function(source: _rates.SourceMode, protocol: ProtocolKind,
                   c: _channel.ChannelParams, mu: float) -> Callable[[float], float]:
    if source is _rates.SourceMode.SINGLE_PHOTON:
        return lambda length: _rates.rate_single_photon(c.at_length(length), protocol)
    if source is _rates.SourceMode.FAINT_DECOY:
        return lambda length: _rates.rate_decoy(c.at_length(length), mu)
    return lambda length: _rates.optimize_faint_mu(c.at_length(length))[1]


def rate_cutoff(source: _rates.SourceMode, protocol: ProtocolKind,
                c: _channel.ChannelParams,
                mu: float = _rates.DEFAULT_DECOY_MU) -> CutoffResult:
    """Largest length with a positive key rate for the given source.

    The decoy source runs at fixed mu; the no-decoy faint source is
    re-optimized at every probed length.
    """
    rate = _rate_function(source, protocol, c, mu)
    return _bisect_cutoff(lambda length: rate(length) > 0.0)


def sweep(source: _rates.SourceMode, protocol: ProtocolKind,
          c: _channel.ChannelParams, l_min: float, l_max: float, step: float,
          mu: float = _rates.DEFAULT_DECOY_MU) -> RateCurve:
    """Rate curve over a regular distance grid."""
    if not step > 0.0:
        raise ValidationError(f"step={step!r} must be > 0")
    if not l_min < l_max:
        raise ValidationError(f"empty grid: l_min={l_min!r}, l_max={l_max!r}")
    if l_min < 0.0:
        raise ValidationError(f"l_min={l_min!r} must be >= 0")
    lengths = np.arange(l_min, l_max + 0.5 * step, step)
    rate = _rate_function(source, protocol, c, mu)
    values = [rate(float(length)) for length in lengths]
    ref = next((v for v in values if v > 0.0), None)
    dbs = [10.0 * math.log10(v / ref) if (ref and v > 0.0) else math.nan
           for v in values]
    return RateCurve(protocol=protocol, source=source,
                     lengths_km=tuple(float(x) for x in lengths),
                     rates=tuple(values), rates_db=tuple(dbs))


def qber_sweep(protocol: ProtocolKind, v_a_list: Sequence[float],
               q_grid: Sequence[float]) -> list[SecurityPoint]:
    """Security quantities tabulated over (visibility, QBER) grids."""
    if len(v_a_list) == 0 or len(q_grid) == 0:
        raise ValidationError("empty sweep grid")
    return [secret_rate(protocol, float(q), float(v))
            for v in v_a_list for q in q_grid]
