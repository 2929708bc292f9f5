"""High-energy expansions of the scattering amplitude and of the charges.

With s = 1/kappa (d = 1, 3) or s = 1/ln(kappa) (d = 2) the amplitude expands
as

    d = 1:  f = -(1/2pi)            sum_m s^m C_m
    d = 2:  f = -(1/2pi) s          sum_m (-2pi s)^m C_m
    d = 3:  f = -(i/2pi^2) s        sum_m (-4pi i s)^m C_m

where C_m = v^T W^m u is built from the coupling matrix W. The d = 3 form
carries a single kappa^-1 prefactor outside the sum; this is the form that
the Neumann series of A(kappa)^-1 produces and the form checked against the
direct solver in the tests.

In d = 2 the off-diagonal Hankel couplings are O(kappa^-1/2) and are not
part of the coefficients; they only contaminate the remainder.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .direct import ScattererSet, WavePair, amplitudes, factorize

__all__ = [
    "Scale",
    "ExpansionCoefficients",
    "CouplingMatrixW",
    "LeadingTerms",
    "coupling_matrix",
    "expansion_coefficients",
    "expansion_coefficient",
    "expansion_terms",
    "truncated_amplitude",
    "leading_terms",
    "cross_term_f322",
    "charge_asymptotics",
    "truncation_errors",
    "order_probe",
    "fit_loglog_slope",
    "DEFAULT_LADDER",
]

DEFAULT_LADDER = (100.0, 178.0, 316.0, 562.0, 1000.0, 1780.0, 3162.0, 5623.0, 10000.0)


class Scale(str, Enum):
    inverse_kappa = "inverse_kappa"
    inverse_log_kappa = "inverse_log_kappa"


@dataclass(frozen=True)
class ExpansionCoefficients:
    dimension: int
    order: int
    scale: Scale
    coefficients: np.ndarray  # C_0 .. C_M


@dataclass(frozen=True)
class CouplingMatrixW:
    dimension: int
    entries: np.ndarray


@dataclass(frozen=True)
class LeadingTerms:
    """Leading amplitude coefficients; unused entries are None."""

    dimension: int
    f11: complex | None = None
    f21: complex | None = None
    f22: complex | None = None
    f31: complex | None = None
    f321: complex | None = None
    f322: complex | None = None

    @property
    def f32(self) -> complex | None:
        if self.f321 is None:
            return None
        return self.f321 + self.f322


def _check_kappa(kappa: float, d: int) -> float:
    kappa = float(kappa)
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    if d == 2 and not kappa > 1:
        raise ValueError("d = 2 expansions need kappa > 1 (ln kappa > 0)")
    return kappa


def _inverse_strengths(s: ScattererSet) -> np.ndarray:
    if np.any(s.strengths == 0):
        raise ValueError("d = 1 expansions need every alpha_j != 0")
    return 1.0 / s.strengths


def coupling_matrix(s: ScattererSet, kappa: float) -> CouplingMatrixW:
    """W for d = 1, 3; the diagonal Z = diag(alpha_j - i/4) for d = 2."""
    d = s.dimension
    kappa = float(kappa)
    if d == 1:
        w = 0.5j * _inverse_strengths(s)[:, None] * np.exp(1j * kappa * s.distances)
    elif d == 2:
        w = np.diag(s.strengths - 0.25j)
    else:
        r = s.distances.copy()
        n = s.count
        r[np.diag_indices(n)] = 1.0
        w = -np.exp(1j * kappa * r) / (4 * np.pi * r)
        w[np.diag_indices(n)] = s.strengths
    return CouplingMatrixW(d, w)


def _pair_vectors(s: ScattererSet, pair: WavePair):
    """u_{j'} and v_j such that C_m = v^T W^m u."""
    u = np.exp(1j * (s.points @ pair.k))
    v = np.exp(-1j * (s.points @ pair.l))
    if s.dimension == 1:
        u = u * _inverse_strengths(s)
    return u, v


def expansion_coefficients(s: ScattererSet, kappa: float, order: int, pair: WavePair) -> ExpansionCoefficients:
    """C_0 .. C_order at (k, l) and kappa."""
    d = s.dimension
    kappa = _check_kappa(kappa, d)
    if order < 0:
        raise ValueError("order must be nonnegative")
    w = coupling_matrix(s, kappa).entries
    u, v = _pair_vectors(s, pair)
    coeffs = np.empty(order + 1, dtype=complex)
    for m in range(order + 1):
        coeffs[m] = v @ u
        u = w @ u
    scale = Scale.inverse_log_kappa if d == 2 else Scale.inverse_kappa
    return ExpansionCoefficients(d, order, scale, coeffs)


def expansion_coefficient(s: ScattererSet, kappa: float, m: int, pair: WavePair) -> complex:
    return complex(expansion_coefficients(s, kappa, m, pair).coefficients[m])


def _term_weights(d: int, kappa: float, order: int) -> np.ndarray:
    m = np.arange(order + 1)
    if d == 1:
        return (-1 / (2 * np.pi)) * kappa ** (-m.astype(float))
    if d == 2:
        s = 1 / np.log(kappa)
        return -(s / (2 * np.pi)) * (-2 * np.pi * s) ** m
    return (-1j / (2 * np.pi**2)) / kappa * (-4j * np.pi / kappa) ** m


def expansion_terms(s: ScattererSet, pair: WavePair, kappa: float, order: int) -> np.ndarray:
    """Individual terms of the truncated amplitude expansion, m = 0 .. order."""
    c = expansion_coefficients(s, kappa, order, pair).coefficients
    return _term_weights(s.dimension, float(kappa), order) * c


def truncated_amplitude(s: ScattererSet, pair: WavePair, kappa: float | None = None, order: int = 0) -> complex:
    kappa = pair.kappa if kappa is None else kappa
    return complex(np.sum(expansion_terms(s, pair, kappa, order)))


def cross_term_f322(points, k, l, kappa: float):
    """sum_{j != j'} exp(i kappa r)/(2 pi^2 r) exp(i (k.y_j - l.y_j')), r = |y_j - y_j'|.

    ``k`` and ``l`` may be single vectors or arrays of shape (m, 3).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    k = np.asarray(k, dtype=float)
    l = np.asarray(l, dtype=float)
    single = k.ndim == 1
    k = k.reshape(-1, 3)
    l = l.reshape(-1, 3)
    n = pts.shape[0]
    if n < 2:
        out = np.zeros(k.shape[0], dtype=complex)
        return complex(out[0]) if single else out
    diff = pts[:, None, :] - pts[None, :, :]
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    off = ~np.eye(n, dtype=bool)
    if np.any(r[off] <= 1e-12):
        raise ValueError("cross term needs pairwise distinct points")
    r[~off] = 1.0
    kern = np.exp(1j * kappa * r) / (2 * np.pi**2 * r)
    kern[~off] = 0.0
    a = np.exp(1j * (k @ pts.T))
    b = np.exp(-1j * (l @ pts.T))
    out = np.einsum("mj,jk,mk->m", a, kern, b)
    return complex(out[0]) if single else out


def leading_terms(s: ScattererSet, pair: WavePair, kappa: float | None = None) -> LeadingTerms:
    d = s.dimension
    kappa = pair.kappa if kappa is None else float(kappa)
    phase = np.exp(1j * (s.points @ (pair.k - pair.l)))
    if d == 1:
        f11 = np.sum(-phase * _inverse_strengths(s)) / (2 * np.pi)
        return LeadingTerms(1, f11=complex(f11))
    if d == 2:
        f21 = -np.sum(phase) / (2 * np.pi)
        f22 = np.sum((s.strengths - 0.25j) * phase)
        return LeadingTerms(2, f21=complex(f21), f22=complex(f22))
    f31 = -1j * np.sum(phase) / (2 * np.pi**2)
    f321 = -2 * np.sum(s.strengths * phase) / np.pi
    f322 = cross_term_f322(s.points, pair.k, pair.l, kappa)
    return LeadingTerms(3, f31=complex(f31), f321=complex(f321), f322=complex(f322))


def charge_asymptotics(s: ScattererSet, k, kappa: float | None = None, order: int = 0) -> np.ndarray:
    """Truncated high-energy expansion of the charges q_j(k)."""
    d = s.dimension
    k = np.atleast_1d(np.asarray(k, dtype=float))
    kappa = float(np.linalg.norm(k)) if kappa is None else float(kappa)
    kappa = _check_kappa(kappa, d)
    w = coupling_matrix(s, kappa).entries
    u = np.exp(1j * (s.points @ k))
    if d == 1:
        u = u * _inverse_strengths(s)
        prefactor, step = -1.0, 1 / kappa
    elif d == 2:
        sl = 1 / np.log(kappa)
        prefactor, step = -2 * np.pi * sl, -2 * np.pi * sl
    else:
        prefactor, step = -4j * np.pi / kappa, -4j * np.pi / kappa
    q = np.zeros(s.count, dtype=complex)
    weight = prefactor
    for _ in range(order + 1):
        q += weight * u
        u = w @ u
        weight *= step
    return q


def fit_loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def truncation_errors(s: ScattererSet, pair_family, kappa_ladder, order: int) -> np.ndarray:
    """|f_exact - f_M| at each kappa; ``pair_family(kappa)`` returns a WavePair."""
    errs = []
    for kappa in kappa_ladder:
        pair = pair_family(kappa)
        if abs(pair.kappa - kappa) > 1e-9 * kappa:
            raise ValueError("pair_family returned a pair with the wrong modulus")
        exact = amplitudes(s, pair.k, pair.l, factorize(s, pair.kappa))[0]
        errs.append(abs(exact - truncated_amplitude(s, pair, pair.kappa, order)))
    return np.asarray(errs)


def order_probe(s: ScattererSet, pair_family, kappa_ladder, order: int) -> float:
    """Empirical decay exponent of the truncation error along ``kappa_ladder``.

    The slope is taken against log kappa for d = 1, 3 and against
    log ln kappa for d = 2. Returns nan when every error is exactly zero
    (e.g. an empty scatterer set).
    """
    ladder = np.asarray(kappa_ladder, dtype=float)
    if ladder.ndim != 1 or ladder.size < 5:
        raise ValueError("kappa ladder needs at least 5 values")
    if np.any(np.diff(ladder) <= 0):
        raise ValueError("kappa ladder must be strictly increasing")
    errs = truncation_errors(s, pair_family, ladder, order)
    if np.all(errs == 0):
        return float("nan")
    x = np.log(ladder) if s.dimension == 2 else ladder
    return fit_loglog_slope(x, np.maximum(errs, np.finfo(float).tiny))
