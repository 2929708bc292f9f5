"""Outgoing Green functions of the Helmholtz operator in d = 1, 2, 3."""

from __future__ import annotations

import numpy as np

from .specialfn import hankel0_first_kind

__all__ = [
    "COINCIDENCE_TOL",
    "SingularityError",
    "check_dimension",
    "as_points",
    "green_plus",
    "green_plus_radial",
    "g_plus",
    "farfield_constant",
]

# distances below this are treated as coincident points
COINCIDENCE_TOL = 1e-12


class SingularityError(ValueError):
    """Evaluation at the singular point of a Green function (d = 2, 3)."""


def check_dimension(d) -> int:
    if d not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2 or 3, got {d!r}")
    return int(d)


def _check_kappa(kappa) -> float:
    kappa = float(kappa)
    if not (np.isfinite(kappa) and kappa > 0):
        raise ValueError(f"kappa must be positive, got {kappa}")
    return kappa


def as_points(x, d: int) -> np.ndarray:
    """Coerce ``x`` to a float array whose last axis has length ``d``.

    In one dimension bare scalars (or 1-D arrays of scalars) are accepted
    and promoted to shape ``(..., 1)``.
    """
    arr = np.asarray(x, dtype=float)
    if d == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., None]
    if arr.ndim == 0 or arr.shape[-1] != d:
        raise ValueError(f"expected coordinates with last axis {d}, got shape {arr.shape}")
    return arr


def green_plus_radial(r, kappa: float, d: int):
    """G+(x, kappa) as a function of r = |x| (array friendly)."""
    d = check_dimension(d)
    kappa = _check_kappa(kappa)
    r = np.asarray(r, dtype=float)
    if d == 1:
        out = np.exp(1j * kappa * r) / (2j * kappa)
    else:
        if np.any(r < COINCIDENCE_TOL):
            raise SingularityError(f"G+ is singular at x = 0 for d = {d}")
        if d == 2:
            out = -0.25j * hankel0_first_kind(r * kappa)
        else:
            out = -np.exp(1j * kappa * r) / (4 * np.pi * r)
    return complex(out) if np.ndim(out) == 0 else out


def green_plus(x, kappa: float, d: int):
    """Outgoing Green function G+(x, kappa) for x of shape (..., d)."""
    d = check_dimension(d)
    r = np.linalg.norm(as_points(x, d), axis=-1)
    return green_plus_radial(r, kappa, d)


def g_plus(x, k, d: int):
    """Plane-wave reduced kernel g+(x, k) = exp(-i k.x) G+(x, |k|)."""
    d = check_dimension(d)
    x = as_points(x, d)
    k = as_points(k, d)
    kappa = float(np.linalg.norm(k))
    phase = np.exp(-1j * (x @ k.reshape(d)))
    out = phase * green_plus(x, kappa, d)
    return complex(out) if np.ndim(out) == 0 else out


def farfield_constant(d: int, kappa: float) -> complex:
    """c(d, kappa) = -pi i (sqrt(2 pi) e^{-i pi/4})^(d-1) kappa^((d-3)/2)."""
    d = check_dimension(d)
    kappa = _check_kappa(kappa)
    base = np.sqrt(2 * np.pi) * np.exp(-0.25j * np.pi)
    return complex(-np.pi * 1j * base ** (d - 1) * kappa ** ((d - 3) / 2))
