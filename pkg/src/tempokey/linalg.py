"""Small-dimension Hermitian linear algebra and entropies.

Everything here operates on plain numpy arrays: state vectors are 1-d
complex arrays, operators are square complex matrices.  Dimensions stay
tiny (at most 16 in this package), so clarity wins over cleverness.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

# Construction-level tolerance: Hermiticity, normalisation, trace checks.
ATOL_CONSTRUCTION = 1e-12
# Spectral tolerance: anything that went through an eigensolver.
ATOL_SPECTRAL = 1e-10
# Eigenvalues in [-EIGENVALUE_CLAMP, 0] are rounding debris and are
# treated as exact zeros; anything more negative is a bug in the caller.
EIGENVALUE_CLAMP = 1e-10


def as_state_vector(psi) -> np.ndarray:
    """Return `psi` as a unit-norm 1-d complex array.

    Raises ValidationError if the norm deviates from 1 beyond the
    construction tolerance.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > ATOL_CONSTRUCTION:
        raise ValidationError(f"state vector norm is {norm!r}, expected 1")
    return psi


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    return m


def _require_hermitian(m: np.ndarray) -> None:
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > ATOL_CONSTRUCTION:
        raise ValidationError(f"matrix is not Hermitian (asymmetry {asym:.3e})")


def eigvals_hermitian(m) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, descending.

    The sum of the returned values equals the trace to spectral accuracy.
    Non-Hermitian input (asymmetry beyond the construction tolerance) is
    rejected rather than silently symmetrised.
    """
    m = _as_square(m)
    _require_hermitian(m)
    return np.linalg.eigvalsh(m)[::-1].copy()


def binary_entropy(q: float) -> float:
    """Shannon entropy of a coin with bias q, in bits.

    >>> binary_entropy(0.5)
    1.0
    >>> binary_entropy(0.0)
    0.0
    """
    q = float(q)
    if q < -ATOL_CONSTRUCTION or q > 1.0 + ATOL_CONSTRUCTION:
        raise ValidationError(f"probability {q!r} outside [0, 1]")
    q = min(max(q, 0.0), 1.0)
    if q == 0.0 or q == 1.0:
        return 0.0
    return float(-q * np.log2(q) - (1.0 - q) * np.log2(1.0 - q))


def entropy_of_spectrum(values) -> float:
    """-sum(p log2 p) over a spectrum, with the 0*log(0) = 0 convention.

    Entries in [-EIGENVALUE_CLAMP, 0] are clamped to zero; more negative
    entries raise, distinguishing rounding noise from genuine negativity.
    """
    w = np.asarray(values, dtype=float).ravel()
    if w.size and float(w.min()) < -EIGENVALUE_CLAMP:
        raise ValidationError(
            f"negative weight {float(w.min()):.3e} below the clamp threshold")
    w = np.where(w > 0.0, w, 0.0)
    pos = w[w > 0.0]
    if pos.size == 0:
        return 0.0
    # + 0.0 turns the -0.0 of a pure spectrum into plain zero.
    return float(-np.sum(pos * np.log2(pos)) + 0.0)


def von_neumann_entropy(rho) -> float:
    """S(rho) = -tr(rho log2 rho) in bits, for a density matrix.

    The input must be Hermitian with unit trace; eigenvalues inside the
    clamp window count as zero, anything more negative is an error.
    """
    rho = _as_square(rho)
    _require_hermitian(rho)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > 1e-9:
        raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
    return entropy_of_spectrum(np.linalg.eigvalsh(rho))


def partial_trace(rho, dims, keep: int) -> np.ndarray:
    """Trace out every tensor factor except `dims[keep]`.

    `dims` lists the factor dimensions whose product must equal the side
    of `rho`.  The result has shape (dims[keep], dims[keep]) and carries
    the trace of the input.
    """
    rho = _as_square(rho)
    dims = [int(d) for d in dims]
    if any(d <= 0 for d in dims):
        raise ValidationError(f"factor dimensions must be positive: {dims}")
    if int(np.prod(dims)) != rho.shape[0]:
        raise ValidationError(
            f"factor dimensions {dims} do not multiply to {rho.shape[0]}")
    if not 0 <= keep < len(dims):
        raise ValidationError(f"keep index {keep} outside 0..{len(dims) - 1}")
    k = len(dims)
    t = rho.reshape(*dims, *dims)
    for ax in reversed(range(k)):
        if ax == keep:
            continue
        t = np.trace(t, axis1=ax, axis2=ax + k)
        k -= 1
    return t
