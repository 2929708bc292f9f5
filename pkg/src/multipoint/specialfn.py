"""Zeroth-order Hankel function of the first kind for real positive arguments.

Small arguments use the ascending series of J0 and Y0, summed in extended
precision so that the cancellation between terms (of size up to I0(x)) stays
below the double-precision floor. Large arguments use the Hankel expansion
H0(x) = sqrt(2/(pi x)) exp(i(x - pi/4)) (P(x) + i Q(x)), truncated at its
smallest term.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["EvalPolicy", "DEFAULT_POLICY", "hankel0_first_kind", "hankel0_asymptotic"]

_LD = np.longdouble
_PI_LD = _LD("3.141592653589793238462643383279502884")
_EULER_LD = _LD("0.577215664901532860606512090082402431")
_PHASE = np.exp(-0.25j * np.pi)

# the series needs ~2.5 x + 20 terms for a 1e-19 tail
_MAX_SERIES_TERMS = 120
_MAX_ASYMPTOTIC_TERMS = 80
_MIN_ASYMPTOTIC_TERMS = 8


@dataclass(frozen=True)
class EvalPolicy:
    """Switch point and accuracy target for :func:`hankel0_first_kind`."""

    series_cutoff: float = 12.0
    target_abs_tol: float = 1e-12

    def __post_init__(self):
        if not self.series_cutoff > 0:
            raise ValueError("series_cutoff must be positive")
        if not self.target_abs_tol > 0:
            raise ValueError("target_abs_tol must be positive")


DEFAULT_POLICY = EvalPolicy()


def _as_positive(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError("Hankel function H0 requires finite arguments x > 0")
    return arr


def _ascending_series(x: np.ndarray) -> np.ndarray:
    xl = x.astype(_LD)
    q = -(xl * xl) / 4
    term = np.ones_like(xl)
    j0 = np.ones_like(xl)
    ysum = np.zeros_like(xl)
    harmonic = _LD(0)
    for k in range(1, _MAX_SERIES_TERMS):
        term = term * q / _LD(k * k)
        harmonic += _LD(1) / _LD(k)
        j0 = j0 + term
        ysum = ysum - harmonic * term
        if np.all(np.abs(term) * harmonic < _LD(1e-21)):
            break
    y0 = (2 / _PI_LD) * ((np.log(xl / 2) + _EULER_LD) * j0 + ysum)
    return j0.astype(float) + 1j * y0.astype(float)


def _hankel_expansion(x: np.ndarray) -> np.ndarray:
    # c_k = prod_{j<=k} (mu - (2j-1)^2) / (k! (8x)^k) with mu = 0
    p = np.ones_like(x)
    q = np.zeros_like(x)
    c = np.ones_like(x)
    smallest = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, _MAX_ASYMPTOTIC_TERMS):
        c = c * (-((2 * k - 1) ** 2)) / (k * 8.0 * x)
        mag = np.abs(c)
        if k > _MIN_ASYMPTOTIC_TERMS:
            active &= mag < smallest
        smallest = np.where(active, np.minimum(smallest, mag), smallest)
        contrib = np.where(active, c, 0.0)
        if k % 2 == 0:
            p += contrib * (-1) ** (k // 2)
        else:
            q += contrib * (-1) ** ((k - 1) // 2)
        if not active.any():
            break
    return np.sqrt(2.0 / (np.pi * x)) * np.exp(1j * x) * _PHASE * (p + 1j * q)


def hankel0_first_kind(x, policy: EvalPolicy = DEFAULT_POLICY):
    """H0^(1)(x) = J0(x) + i Y0(x) for real x > 0.

    Accepts scalars or arrays; returns a complex of the same shape.
    Raises ValueError for x <= 0 (logarithmic singularity of Y0).
    """
    arr = _as_positive(x)
    flat = arr.ravel()
    out = np.empty(flat.shape, dtype=complex)
    small = flat < policy.series_cutoff
    if small.any():
        out[small] = _ascending_series(flat[small])
    if (~small).any():
        out[~small] = _hankel_expansion(flat[~small])
    out = out.reshape(arr.shape)
    return complex(out) if out.ndim == 0 else out


def hankel0_asymptotic(x):
    """Leading large-argument term sqrt(2/(pi x)) exp(i(x - pi/4))."""
    arr = _as_positive(x)
    out = np.sqrt(2.0 / (np.pi * arr)) * np.exp(1j * arr) * _PHASE
    return complex(out) if np.ndim(out) == 0 else out
