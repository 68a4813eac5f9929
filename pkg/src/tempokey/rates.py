"""Key rates for faint-pulse and single-photon sources.

A weak coherent source opens the photon-number-splitting door: every
multiphoton pulse must be written off to the eavesdropper, which is the
GLLP-style penalty in `rate_faint`.  Decoy states recover the
single-photon gain and pay only the error-correction cost on the full
signal (`rate_decoy`).  `rate_single_photon` is the ideal-source
reference built on the collective-attack rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from . import channel as _channel
from .attack import secret_rate
from .errors import ValidationError
from .linalg import ATOL_CONSTRUCTION, binary_entropy
from .protocol import ProtocolKind

# Fixed decoy-state mean photon number; the no-decoy source is instead
# re-optimized at every distance.
DEFAULT_DECOY_MU = 0.5


class SourceMode(Enum):
    SINGLE_PHOTON = "single_photon"
    FAINT_NO_DECOY = "faint_no_decoy"
    FAINT_DECOY = "faint_decoy"


@dataclass(frozen=True)
class GainErrorPoint:
    """Detection statistics of a faint source over one channel."""

    g_mu: float
    q_mu: float
    delta: float
    g_1: float
    q_1: float


def coherent_detection_probs(a1_sq: float, a2_sq: float, mu: float,
                             eta: float, p_d: float) -> tuple[float, float]:
    """Single-click probabilities for a two-slot weak coherent pulse.

    The pulse splits its mean photon number mu over the two slots with
    weights a1_sq, a2_sq (summing to 1).  A detection in slot 1 needs at
    least one surviving photon there and none in slot 2, plus the dark
    contribution:  p1 = (1 - e^(-a1^2 eta mu)) e^(-a2^2 eta mu) + p_d.
    """
    a1_sq = float(a1_sq)
    a2_sq = float(a2_sq)
    if a1_sq < 0.0 or a2_sq < 0.0 or abs(a1_sq + a2_sq - 1.0) > ATOL_CONSTRUCTION:
        raise ValidationError(f"slot weights ({a1_sq!r}, {a2_sq!r}) must be "
                              "nonnegative and sum to 1")
    if mu < 0.0:
        raise ValidationError(f"mu={mu!r} must be >= 0")
    if not 0.0 <= eta <= 1.0 or not 0.0 <= p_d <= 1.0:
        raise ValidationError("eta and p_d must be probabilities")
    n1 = a1_sq * eta * mu
    n2 = a2_sq * eta * mu
    p1 = -math.expm1(-n1) * math.exp(-n2) + p_d
    p2 = -math.expm1(-n2) * math.exp(-n1) + p_d
    return p1, p2


def gain_and_qber_mu(c: _channel.ChannelParams, mu: float) -> GainErrorPoint:
    """Gain and error rate of a faint source with mean photon number mu.

    G_mu = (1 - e^(-eta mu)) + 2 p_d and
    Q_mu = (q_a (1 - e^(-eta mu)) + p_d) / G_mu; the single-photon
    fields carry the decoy-estimated values g_1 = e^(-mu) mu eta and
    the single-photon error rate of the channel.
    """
    if mu <= 0.0:
        raise ValidationError(f"mu={mu!r} must be > 0")
    eta = _channel.transmission(c)
    arrived = -math.expm1(-eta * mu)
    g_mu = arrived + 2.0 * c.p_dark
    q_mu = 0.5 if g_mu == 0.0 else (c.q_a * arrived + c.p_dark) / g_mu
    delta = mu / (2.0 * eta) if eta > 0.0 else math.inf
    return GainErrorPoint(g_mu=g_mu, q_mu=q_mu, delta=delta,
                          g_1=math.exp(-mu) * mu * eta, q_1=_channel.qber(c))


def multiphoton_fraction(mu: float, eta: float) -> float:
    """Fraction of detections the multiphoton budget can account for.

    First-order bound delta = mu / (2 eta).  Beyond 1 the tagging
    argument collapses (every detection could be multiphoton), which is
    rejected rather than clamped.
    """
    if mu < 0.0:
        raise ValidationError(f"mu={mu!r} must be >= 0")
    if not 0.0 < eta <= 1.0:
        raise ValidationError(f"eta={eta!r} outside (0, 1]")
    delta = mu / (2.0 * eta)
    if delta > 1.0:
        raise ValidationError(f"multiphoton fraction {delta!r} exceeds 1")
    return delta


def rate_faint(c: _channel.ChannelParams, mu: float) -> float:
    """Secret bits per pulse for a faint source without decoy states.

    All multiphoton pulses are credited to the eavesdropper:
    R = G_mu [ (1 - delta)(1 - h(Q_mu / (1 - delta))) - h(Q_mu) ],
    clamped at zero whenever the penalty eats the whole gain.
    """
    if mu <= 0.0:
        raise ValidationError(f"mu={mu!r} must be > 0")
    eta = _channel.transmission(c)
    if eta <= 0.0:
        return 0.0
    delta = mu / (2.0 * eta)
    if delta >= 1.0:
        return 0.0
    point = gain_and_qber_mu(c, mu)
    q_scaled = point.q_mu / (1.0 - delta)
    if q_scaled >= 0.5:
        return 0.0
    r = point.g_mu * ((1.0 - delta) * (1.0 - binary_entropy(q_scaled))
                      - binary_entropy(point.q_mu))
    return max(0.0, r)


def rate_decoy(c: _channel.ChannelParams, mu: float = DEFAULT_DECOY_MU) -> float:
    """Secret bits per pulse with asymptotic decoy-state estimation.

    R = -G_mu h(Q_mu) + G_1 (1 - h(Q_1)), with the single-photon gain
    G_1 = e^(-mu) mu eta known from the decoy statistics.  Clamped at
    zero.
    """
    point = gain_and_qber_mu(c, mu)
    q_1 = min(point.q_1, 0.5)
    r = -point.g_mu * binary_entropy(point.q_mu) + point.g_1 * (1.0 - binary_entropy(q_1))
    return max(0.0, r)


def rate_single_photon(c: _channel.ChannelParams, protocol: ProtocolKind) -> float:
    """Secret bits per pulse for an ideal single-photon source.

    Detection probability (eta + 2 p_d) times the collective-attack
    rate at the channel QBER, clamped at zero.
    """
    q = min(_channel.qber(c), 0.5)
    point = secret_rate(protocol, q, c.v_a)
    return (_channel.transmission(c) + 2.0 * c.p_dark) * max(0.0, point.delta_i)


def optimize_faint_mu(c: _channel.ChannelParams) -> tuple[float, float]:
    """Best mean photon number for the no-decoy faint source.

    Scans a coarse logarithmic grid over (0, min(1, 2 eta)) and refines
    with a bounded scalar minimiser.  Returns (mu, rate); the rate is 0
    beyond the cut-off, where the returned mu is just the least-bad
    grid point.
    """
    eta = _channel.transmission(c)
    if eta <= 0.0:
        return 0.0, 0.0
    mu_hi = min(1.0, 2.0 * eta * (1.0 - 1e-9))
    grid = np.geomspace(mu_hi * 1e-4, mu_hi, 60)
    rates = np.array([rate_faint(c, float(m)) for m in grid])
    k = int(np.argmax(rates))
    if rates[k] <= 0.0:
        return float(grid[k]), 0.0
    lo = float(grid[max(0, k - 1)])
    hi = float(grid[min(len(grid) - 1, k + 1)])
    res = minimize_scalar(lambda m: -rate_faint(c, m), bounds=(lo, hi),
                          method="bounded", options={"xatol": mu_hi * 1e-6})
    mu_best = float(res.x)
    best = rate_faint(c, mu_best)
    if best < rates[k]:
        return float(grid[k]), float(rates[k])
    return mu_best, best
