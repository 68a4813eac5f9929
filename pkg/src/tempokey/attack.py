"""Optimal collective attacks: spectra, Holevo bound, secret rate.

The eavesdropper entangles an ancilla with every pulse.  After Bob's
projective measurement the joint Alice-Bob state is block diagonal: a
"correct" block weighted by the fidelities F1, F2 and an "error" block
weighted by the error rates Q1, Q2, with the residual coherences given
by the ancilla overlaps s_1122 = <11|22> and s_1221 = <12|21>.  The
eigenvalues of that matrix carry every entropy in the analysis.

Sign conventions: F = (F1+F2)/2, Q = (Q1+Q2)/2, dQ = (Q1-Q2)/2, and a
two-slot fringe visibility v constrains the overlaps through
F*s_1122 + Q*s_1221 = v.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import ValidationError
from .linalg import ATOL_CONSTRUCTION, binary_entropy, entropy_of_spectrum
from .protocol import ProtocolKind

# Bisection tolerance on QBER thresholds.
QBER_TOL = 1e-6

_LN2 = np.log(2.0)


def _check_prob(name: str, x: float) -> float:
    x = float(x)
    if not -ATOL_CONSTRUCTION <= x <= 1.0 + ATOL_CONSTRUCTION:
        raise ValidationError(f"{name}={x!r} outside [0, 1]")
    return min(max(x, 0.0), 1.0)


def _check_overlap(name: str, s: float) -> float:
    s = float(s)
    if abs(s) > 1.0 + ATOL_CONSTRUCTION:
        raise ValidationError(f"{name}={s!r} outside [-1, 1]")
    return min(max(s, -1.0), 1.0)


@dataclass(frozen=True)
class AttackParams:
    """Free parameters of a collective attack on a two-slot protocol."""

    f1: float
    q1: float
    f2: float
    q2: float
    s_1122: float
    s_1221: float

    def __post_init__(self):
        for name in ("f1", "q1", "f2", "q2"):
            object.__setattr__(self, name, _check_prob(name, getattr(self, name)))
        object.__setattr__(self, "s_1122", _check_overlap("s_1122", self.s_1122))
        object.__setattr__(self, "s_1221", _check_overlap("s_1221", self.s_1221))
        if abs(self.f1 + self.q1 - 1.0) > ATOL_CONSTRUCTION:
            raise ValidationError(f"f1 + q1 = {self.f1 + self.q1!r}, expected 1")
        if abs(self.f2 + self.q2 - 1.0) > ATOL_CONSTRUCTION:
            raise ValidationError(f"f2 + q2 = {self.f2 + self.q2!r}, expected 1")

    @property
    def f(self) -> float:
        return 0.5 * (self.f1 + self.f2)

    @property
    def q(self) -> float:
        return 0.5 * (self.q1 + self.q2)

    @property
    def dq(self) -> float:
        return 0.5 * (self.q1 - self.q2)


@dataclass(frozen=True)
class ThreeStateAttackGeometry:
    """Eve's ancilla geometry for the three-slot protocol.

    The two adjacent-slot overlaps are pinned to cos(phi) by the
    observed fringe; the outer-slot overlap v13 is Eve's to choose and
    is minimal (in magnitude) at the coplanar value cos(2 phi), or zero
    once phi exceeds pi/4 and the outer states can be made orthogonal.
    """

    phi: float
    v13: float

    @classmethod
    def from_observables(cls, q: float, v_a: float) -> "ThreeStateAttackGeometry":
        q = _check_prob("q", q)
        v_a = _check_prob("v_a", v_a)
        if q > 0.5:
            raise ValidationError(f"q={q!r} outside [0, 0.5]")
        cos_phi = (1.0 - 2.0 * q) * v_a
        v13 = max(0.0, 2.0 * cos_phi * cos_phi - 1.0)
        return cls(phi=float(np.arccos(cos_phi)), v13=v13)


@dataclass(frozen=True)
class SecurityPoint:
    """Entropies and rate at one (QBER, source visibility) point."""

    qber: float
    visibility_va: float
    s_rho_e: float
    chi_ae: float
    i_ab: float
    delta_i: float


@dataclass(frozen=True)
class AttackOptimum:
    """Result of the brute-force attack search."""

    params: AttackParams
    s_max: float
    geometry: ThreeStateAttackGeometry | None = None


def rho_ab_projected(p: AttackParams) -> np.ndarray:
    """Joint Alice-Bob density matrix after Bob's projection, 4x4.

    Basis order: the correct events (|11>, |22>) then the error events
    (|12>, |21>).  Block diagonal with unit trace.
    """
    cf = 0.5 * np.sqrt(p.f1 * p.f2) * p.s_1122
    cq = 0.5 * np.sqrt(p.q1 * p.q2) * p.s_1221
    return np.array([
        [0.5 * p.f1, cf, 0.0, 0.0],
        [cf, 0.5 * p.f2, 0.0, 0.0],
        [0.0, 0.0, 0.5 * p.q1, cq],
        [0.0, 0.0, cq, 0.5 * p.q2],
    ], dtype=complex)


def gamma_eigenvalues(f: float, q: float, dq: float,
                      s_1122: float, s_1221: float) -> np.ndarray:
    """Closed-form eigenvalues of the projected joint state.

    Two per block: (f +/- rf)/2 and (q +/- rq)/2 with
    rf = sqrt((1 - s_1122^2) dq^2 + s_1122^2 f^2) and the error-block
    analogue.  They sum to 1 and are nonnegative over the admissible
    parameter ranges.
    """
    f = _check_prob("f", f)
    q = _check_prob("q", q)
    s_1122 = _check_overlap("s_1122", s_1122)
    s_1221 = _check_overlap("s_1221", s_1221)
    dq = float(dq)
    if abs(f + q - 1.0) > ATOL_CONSTRUCTION:
        raise ValidationError(f"f + q = {f + q!r}, expected 1")
    if abs(dq) > min(q, 1.0 - q) + ATOL_CONSTRUCTION:
        raise ValidationError(f"|dq|={abs(dq)!r} exceeds min(q, 1-q)={min(q, 1.0 - q)!r}")
    rf = np.sqrt((1.0 - s_1122 ** 2) * dq ** 2 + (s_1122 * f) ** 2)
    rq = np.sqrt((1.0 - s_1221 ** 2) * dq ** 2 + (s_1221 * q) ** 2)
    g = np.array([0.5 * (f + rf), 0.5 * (f - rf), 0.5 * (q + rq), 0.5 * (q - rq)])
    return np.where(np.abs(g) < 1e-15, 0.0, g)


def s_rho_e_max(q: float, v12: float) -> float:
    """Eve's maximal entropy at symmetric errors and fringe visibility v12.

    This is the entropy of the symmetric-attack spectrum with f = 1 - q
    and both overlaps equal to v12: the optimum the brute-force search
    reconfirms.
    """
    q = _check_prob("q", q)
    if q > 0.5 + ATOL_CONSTRUCTION:
        raise ValidationError(f"q={q!r} outside [0, 0.5]")
    v12 = _check_overlap("v12", v12)
    if v12 < 0.0:
        raise ValidationError(f"v12={v12!r} must be nonnegative")
    return entropy_of_spectrum(gamma_eigenvalues(1.0 - q, q, 0.0, v12, v12))


def holevo_chi_ae(q1: float, q2: float, s_rho_e: float) -> float:
    """Holevo bound on Eve's information about the sifted key.

    Eve's conditional states split by Alice's bit carry the error-rate
    entropies, so chi = S(rho_E) - (h(q1) + h(q2)) / 2.
    """
    return float(s_rho_e) - 0.5 * (binary_entropy(q1) + binary_entropy(q2))


def mutual_info_ab(q1: float, q2: float) -> float:
    """Alice-Bob mutual information: 1 - (h(q1) + h(q2)) / 2."""
    return 1.0 - 0.5 * (binary_entropy(q1) + binary_entropy(q2))


def secret_rate(protocol: ProtocolKind, q: float, v_a: float) -> SecurityPoint:
    """Collective-attack secret rate at symmetric QBER q and visibility v_a.

    Two-slot protocols (TS2, C3TS) give Eve the fringe constraint
    v12 = (1 - 2q) v_a.  TS3 only constrains adjacent slots, so Eve
    relaxes the key-carrying outer coherence to max(0, 2 v12^2 - 1); at
    zero she holds the full key and delta_i = -h(q) <= 0.  delta_i is
    returned signed; rate pipelines clamp at zero.
    """
    q = _check_prob("q", q)
    if q > 0.5 + ATOL_CONSTRUCTION:
        raise ValidationError(f"q={q!r} outside [0, 0.5]")
    v_a = _check_prob("v_a", v_a)
    if protocol is ProtocolKind.TS3:
        v_eff = ThreeStateAttackGeometry.from_observables(q, v_a).v13
    else:
        v_eff = (1.0 - 2.0 * q) * v_a
    s = s_rho_e_max(q, v_eff)
    chi = holevo_chi_ae(q, q, s)
    i_ab = mutual_info_ab(q, q)
    return SecurityPoint(qber=q, visibility_va=v_a, s_rho_e=s, chi_ae=chi,
                         i_ab=i_ab, delta_i=i_ab - chi)


def max_qber(protocol: ProtocolKind, v_a: float) -> float:
    """Largest QBER with positive secret rate, bisected to 1e-6.

    Returns 0 when the rate is already nonpositive at q = 0 (a source
    visibility too low to certify any secrecy).
    """
    v_a = _check_prob("v_a", v_a)
    if v_a <= 0.0:
        raise ValidationError("v_a must be positive")

    def delta_i(q: float) -> float:
        return secret_rate(protocol, q, v_a).delta_i

    if delta_i(0.0) <= 0.0:
        return 0.0
    lo, hi = 0.0, 0.5
    while hi - lo > QBER_TOL:
        mid = 0.5 * (lo + hi)
        if delta_i(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _grid_entropy(g1, g2, g3, g4):
    """Entropy in bits over stacked spectra, tolerant of -0.0 debris."""
    s = np.zeros(np.broadcast(g1, g2).shape)
    for g in (g1, g2, g3, g4):
        g = np.clip(g, 0.0, None)
        s -= xlogy(g, g)
    return s / _LN2


def optimize_attack_bruteforce(protocol: ProtocolKind, q: float, v_target: float,
                               grid_resolution: int) -> AttackOptimum:
    """Grid search over Eve's free parameters, maximising S(rho_E).

    For TS2/C3TS the grid runs over dq and s_1122 with s_1221 pinned by
    the fringe constraint f*s_1122 + q*s_1221 = v_target.  For TS3,
    v_target plays the role of the source visibility: the adjacent
    overlaps are pinned to cos(phi) = (1-2q) v_target and the search
    runs over dq and the outer-pair angle.  Ties break to the first
    grid point in row-major order, so results do not depend on any
    evaluation schedule.
    """
    n = int(grid_resolution)
    if n < 50:
        raise ValidationError(f"grid_resolution={n} must be >= 50")
    q = _check_prob("q", q)
    if q > 0.5 + ATOL_CONSTRUCTION:
        raise ValidationError(f"q={q!r} outside [0, 0.5]")
    v_target = float(v_target)
    if v_target > 1.0 + ATOL_CONSTRUCTION or v_target < 0.0:
        raise ValidationError(f"v_target={v_target!r} outside [0, 1]")
    v_target = min(v_target, 1.0)
    f = 1.0 - q

    m = min(q, 1.0 - q)
    dq_grid = np.linspace(-m, m, n) if m > 0.0 else np.array([0.0])

    if protocol is ProtocolKind.TS3:
        geo = ThreeStateAttackGeometry.from_observables(q, v_target)
        cos_phi = np.cos(geo.phi)
        theta = np.linspace(0.0, np.pi, n)
        v13 = cos_phi ** 2 + (1.0 - cos_phi ** 2) * np.cos(theta)
        dq = dq_grid[:, None]
        v = v13[None, :]
        rf = np.sqrt((1.0 - v ** 2) * dq ** 2 + (v * f) ** 2)
        rq = np.sqrt((1.0 - v ** 2) * dq ** 2 + (v * q) ** 2)
        s = _grid_entropy(0.5 * (f + rf), 0.5 * (f - rf),
                          0.5 * (q + rq), 0.5 * (q - rq))
        i, j = np.unravel_index(int(np.argmax(s)), s.shape)
        best_dq = float(dq_grid[i])
        best_v = float(v13[j])
        params = AttackParams(f1=f - best_dq, q1=q + best_dq,
                              f2=f + best_dq, q2=q - best_dq,
                              s_1122=best_v, s_1221=best_v)
        best_geo = ThreeStateAttackGeometry(phi=geo.phi, v13=best_v)
        return AttackOptimum(params=params, s_max=float(s[i, j]), geometry=best_geo)

    # Fringe constraint: s_1221 = (v - f s_1122) / q, both overlaps in [-1, 1].
    if q > 0.0:
        lo = max(-1.0, (v_target - q) / f)
        hi = min(1.0, (v_target + q) / f)
        s1_grid = np.linspace(lo, hi, n)
        s2_grid = (v_target - f * s1_grid) / q
    else:
        s1_grid = np.array([v_target / f])
        s2_grid = np.array([0.0])
    dq = dq_grid[:, None]
    s1 = s1_grid[None, :]
    s2 = s2_grid[None, :]
    rf = np.sqrt((1.0 - s1 ** 2) * dq ** 2 + (s1 * f) ** 2)
    rq = np.sqrt((1.0 - s2 ** 2) * dq ** 2 + (s2 * q) ** 2)
    s = _grid_entropy(0.5 * (f + rf), 0.5 * (f - rf),
                      0.5 * (q + rq), 0.5 * (q - rq))
    i, j = np.unravel_index(int(np.argmax(s)), s.shape)
    best_dq = float(dq_grid[i])
    params = AttackParams(f1=f - best_dq, q1=q + best_dq,
                          f2=f + best_dq, q2=q - best_dq,
                          s_1122=float(s1_grid[j]), s_1221=float(s2_grid[j]))
    return AttackOptimum(params=params, s_max=float(s[i, j]))
