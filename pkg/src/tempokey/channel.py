"""Fiber channel model: transmission, QBER, visibility, depolarization.

The channel is characterised by a handful of numbers: fiber attenuation
in dB/km, detector efficiency, per-slot dark-count probability, the
source visibility and the intrinsic error rate of Alice's preparation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class ChannelParams:
    alpha_db_per_km: float = 0.2
    length_km: float = 0.0
    eta_detector: float = 0.1
    p_dark: float = 1e-7
    v_a: float = 1.0
    q_a: float = 0.02

    def __post_init__(self):
        if self.alpha_db_per_km < 0.0:
            raise ValidationError(f"alpha_db_per_km={self.alpha_db_per_km!r} must be >= 0")
        if self.length_km < 0.0:
            raise ValidationError(f"length_km={self.length_km!r} must be >= 0")
        for name in ("eta_detector", "p_dark", "v_a", "q_a"):
            x = getattr(self, name)
            if not 0.0 <= x <= 1.0:
                raise ValidationError(f"{name}={x!r} outside [0, 1]")

    def at_length(self, length_km: float) -> "ChannelParams":
        """Same channel moved to a different fiber length."""
        return replace(self, length_km=float(length_km))


def transmission(c: ChannelParams) -> float:
    """Overall transmission: detector efficiency times fiber loss."""
    return c.eta_detector * 10.0 ** (-c.alpha_db_per_km * c.length_km / 10.0)


def qber(c: ChannelParams) -> float:
    """Error rate of the sifted time-basis bits.

    Errors come from Alice's intrinsic flips (surviving with the signal)
    and from dark counts in the two key-carrying slots:
    Q = (eta q_a + p_d) / (eta + 2 p_d), tending to q_a for a strong
    signal and to 1/2 once dark counts dominate.
    """
    eta = transmission(c)
    denom = eta + 2.0 * c.p_dark
    if denom == 0.0:
        return 0.5
    return (eta * c.q_a + c.p_dark) / denom


def bob_visibility(c: ChannelParams) -> float:
    """Fringe visibility Bob observes without an eavesdropper: eta * v_a.

    The security analysis itself charges the source visibility v_a, not
    this product, to the attacker (the attacker may replace the lossy
    fiber with a perfect one); this value is what the no-attack channel
    and the simulator actually show.
    """
    return transmission(c) * c.v_a


def depolarize(rho_a, eta: float) -> np.ndarray:
    """Qubit after partial depolarization: eta*rho + (1-eta)/2 * I.

    A basis state comes out with fidelity (1+eta)/2, so an intrinsic
    error rate q_a corresponds to eta = 1 - 2 q_a.
    """
    rho_a = np.asarray(rho_a, dtype=complex)
    if rho_a.shape != (2, 2):
        raise ValidationError(f"expected a 2x2 density matrix, got {rho_a.shape}")
    if not 0.0 <= eta <= 1.0:
        raise ValidationError(f"eta={eta!r} outside [0, 1]")
    tr = float(np.trace(rho_a).real)
    if abs(tr - 1.0) > 1e-9:
        raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
    return eta * rho_a + (1.0 - eta) * 0.5 * np.eye(2, dtype=complex)
