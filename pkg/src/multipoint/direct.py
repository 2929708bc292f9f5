"""Direct scattering for multipoint potentials.

The scattering solution is

    psi+(x, k) = exp(i k.x) + sum_j q_j(k) G+(x - y_j, kappa)

with charges q solving A(kappa) q = b(k), b_j = -exp(i k.y_j), and the
amplitude is f(k, l) = (2 pi)^-d sum_j q_j(k) exp(-i l.y_j).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .greens import (
    COINCIDENCE_TOL,
    SingularityError,
    as_points,
    check_dimension,
    farfield_constant,
    green_plus_radial,
)

__all__ = [
    "SingularSystem",
    "ScattererSet",
    "WavePair",
    "ChargeVector",
    "ProbeGeometry",
    "FactorizedSystem",
    "CONDITION_LIMIT",
    "build_interaction_matrix",
    "factorize",
    "solve_charges",
    "charges_batch",
    "scattering_amplitude",
    "amplitudes",
    "scattered_field",
    "total_field",
    "gamma_convention",
    "manifold_points",
    "manifold_pairs",
    "manifold_amplitudes",
    "farfield_defects",
]

CONDITION_LIMIT = 1e12
RESIDUAL_TOL = 1e-10


class SingularSystem(ArithmeticError):
    """A(kappa) is singular or numerically rank deficient at this kappa."""

    def __init__(self, kappa: float, condition_estimate: float, message: str | None = None):
        self.kappa = float(kappa)
        self.condition_estimate = float(condition_estimate)
        super().__init__(
            message
            or f"interaction matrix singular at kappa={self.kappa:.12g} "
            f"(condition estimate {self.condition_estimate:.3e})"
        )


@dataclass(frozen=True)
class ScattererSet:
    """Point positions ``points`` (n, d) and complex strengths ``strengths`` (n,)."""

    dimension: int
    points: np.ndarray
    strengths: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        d = check_dimension(self.dimension)
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = np.zeros((0, d))
        elif d == 1 and pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] != d:
            raise ValueError(f"points must have shape (n, {d}), got {pts.shape}")
        alpha = np.asarray(self.strengths, dtype=complex).reshape(-1)
        if alpha.shape[0] != pts.shape[0]:
            raise ValueError("points and strengths must have equal length")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(alpha))):
            raise ValueError("points and strengths must be finite")
        n = pts.shape[0]
        if n > 1:
            dist = _pairwise_distances(pts)
            dist[np.diag_indices(n)] = np.inf
            if dist.min() <= COINCIDENCE_TOL:
                raise ValueError("scatterer positions must be pairwise distinct")
        pts.setflags(write=False)
        alpha.setflags(write=False)
        object.__setattr__(self, "dimension", d)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "strengths", alpha)
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def empty(cls, dimension: int) -> "ScattererSet":
        return cls(dimension, np.zeros((0, dimension)), np.zeros(0, dtype=complex))

    @property
    def count(self) -> int:
        return self.points.shape[0]

    def __len__(self) -> int:
        return self.count

    @cached_property
    def distances(self) -> np.ndarray:
        """Pairwise distance matrix |y_j - y_j'|."""
        return _pairwise_distances(self.points)


def _pairwise_distances(pts: np.ndarray) -> np.ndarray:
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


@dataclass(frozen=True)
class WavePair:
    """Incident ``k`` and outgoing ``l`` wavevectors with |k| = |l| = kappa."""

    k: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        k = np.atleast_1d(np.asarray(self.k, dtype=float))
        l = np.atleast_1d(np.asarray(self.l, dtype=float))
        if k.shape != l.shape or k.ndim != 1:
            raise ValueError("k and l must be vectors of equal length")
        check_dimension(k.shape[0])
        nk, nl = np.linalg.norm(k), np.linalg.norm(l)
        if nk <= 0:
            raise ValueError("|k| must be positive")
        if abs(nk - nl) > 1e-12 * nk:
            raise ValueError(f"|k| = {nk!r} and |l| = {nl!r} differ: pair is not on M_E")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "l", l)

    @property
    def kappa(self) -> float:
        return float(np.linalg.norm(self.k))

    @property
    def dimension(self) -> int:
        return self.k.shape[0]

    def reversed(self) -> "WavePair":
        """The reciprocal pair (-l, -k)."""
        return WavePair(-self.l, -self.k)


@dataclass(frozen=True)
class ChargeVector:
    values: np.ndarray
    kappa: float
    residual_norm: float
    condition_estimate: float


@dataclass(frozen=True)
class ProbeGeometry:
    """Momentum transfer ``p`` at energy ``energy``; gamma defaults to the fixed convention."""

    p: np.ndarray
    energy: float
    gamma: np.ndarray | None = field(default=None)

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        d = p.shape[0]
        if d not in (2, 3):
            raise ValueError("the (p, E) parameterization needs d = 2 or 3")
        energy = float(self.energy)
        if not energy > 0:
            raise ValueError("energy must be positive")
        if not np.dot(p, p) < 4 * energy:
            raise ValueError(f"|p| = {np.linalg.norm(p):.6g} must be below 2 sqrt(E) = {2 * np.sqrt(energy):.6g}")
        gamma = gamma_convention(p, d) if self.gamma is None else np.asarray(self.gamma, dtype=float)
        if abs(np.linalg.norm(gamma) - 1) > 1e-12 or abs(gamma @ p) > 1e-12 * max(1.0, np.linalg.norm(p)):
            raise ValueError("gamma must be a unit vector orthogonal to p")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "energy", energy)
        object.__setattr__(self, "gamma", gamma)


def build_interaction_matrix(s: ScattererSet, kappa: float) -> np.ndarray:
    """A(kappa): renormalized diagonal plus G+(y_j - y_j') off the diagonal."""
    kappa = float(kappa)
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    n, d = s.count, s.dimension
    if d == 1:
        diag = s.strengths + 1 / (2j * kappa)
    elif d == 2:
        diag = s.strengths - (np.pi * 1j - 2 * np.log(kappa)) / (4 * np.pi)
    else:
        diag = s.strengths - 1j * kappa / (4 * np.pi)
    a = np.zeros((n, n), dtype=complex)
    if n > 1:
        iu = np.triu_indices(n, 1)
        off = green_plus_radial(s.distances[iu], kappa, d)
        a[iu] = off
        a[(iu[1], iu[0])] = off
    a[np.diag_indices(n)] = diag
    return a


class FactorizedSystem:
    """LU factorization of A(kappa), reusable across right-hand sides."""

    def __init__(self, s: ScattererSet, kappa: float, condition_limit: float = CONDITION_LIMIT):
        self.scatterers = s
        self.kappa = float(kappa)
        self.matrix = build_interaction_matrix(s, kappa)
        n = s.count
        if n == 0:
            self.condition_estimate = 1.0
            self._lu = None
            return
        anorm = np.abs(self.matrix).sum(axis=0).max()
        with np.errstate(all="ignore"):
            lu, piv, info = lapack.zgetrf(self.matrix)
        if info > 0 or anorm == 0:
            raise SingularSystem(self.kappa, np.inf)
        rcond, _ = lapack.zgecon(lu, anorm, norm="1")
        self.condition_estimate = np.inf if rcond == 0 else 1.0 / rcond
        if not self.condition_estimate < condition_limit:
            raise SingularSystem(self.kappa, self.condition_estimate)
        self._lu = (lu, piv)

    def solve(self, b: np.ndarray) -> np.ndarray:
        if self._lu is None:
            return np.zeros_like(np.asarray(b, dtype=complex))
        return scipy.linalg.lu_solve(self._lu, b, check_finite=False)


def factorize(s: ScattererSet, kappa: float) -> FactorizedSystem:
    return FactorizedSystem(s, kappa)


def _kappa_of(ks: np.ndarray) -> float:
    norms = np.linalg.norm(ks, axis=-1)
    kappa = float(norms.flat[0]) if norms.size else 0.0
    if not kappa > 0:
        raise ValueError("|k| must be positive")
    if np.any(np.abs(norms - kappa) > 1e-12 * kappa):
        raise ValueError("all wavevectors in a batch must share |k|")
    return kappa


def charges_batch(s: ScattererSet, ks, system: FactorizedSystem | None = None) -> np.ndarray:
    """Charges for many incident wavevectors of common modulus; shape (m, n)."""
    ks = as_points(ks, s.dimension).reshape(-1, s.dimension)
    kappa = _kappa_of(ks)
    if system is None:
        system = FactorizedSystem(s, kappa)
    elif abs(system.kappa - kappa) > 1e-12 * kappa:
        raise ValueError("factorized system was built for a different kappa")
    b = -np.exp(1j * (s.points @ ks.T))  # (n, m)
    q = system.solve(b)
    if s.count:
        res = np.linalg.norm(system.matrix @ q - b, axis=0)
        bound = RESIDUAL_TOL * (1 + np.linalg.norm(b, axis=0))
        if np.any(res > bound):
            raise SingularSystem(kappa, system.condition_estimate, "residual check failed")
    return q.T


def solve_charges(s: ScattererSet, k) -> ChargeVector:
    """Solve A(|k|) q = b(k)."""
    k = as_points(k, s.dimension).reshape(s.dimension)
    kappa = float(np.linalg.norm(k))
    system = FactorizedSystem(s, kappa)
    b = -np.exp(1j * (s.points @ k))
    q = system.solve(b)
    res = float(np.linalg.norm(system.matrix @ q - b)) if s.count else 0.0
    if res > RESIDUAL_TOL * (1 + np.linalg.norm(b)):
        raise SingularSystem(kappa, system.condition_estimate, "residual check failed")
    return ChargeVector(q, kappa, res, system.condition_estimate)


def amplitudes(s: ScattererSet, ks, ls, system: FactorizedSystem | None = None) -> np.ndarray:
    """f(k_i, l_i) for paired rows of ``ks`` and ``ls`` sharing one kappa."""
    d = s.dimension
    ks = as_points(ks, d).reshape(-1, d)
    ls = as_points(ls, d).reshape(-1, d)
    if ks.shape != ls.shape:
        raise ValueError("ks and ls must pair up row by row")
    if s.count == 0:
        return np.zeros(ks.shape[0], dtype=complex)
    q = charges_batch(s, ks, system)
    phase = np.exp(-1j * (ls @ s.points.T))
    return np.sum(q * phase, axis=1) / (2 * np.pi) ** d


def scattering_amplitude(s: ScattererSet, pair: WavePair) -> complex:
    """f(k, l) = (2 pi)^-d sum_j q_j(k) exp(-i l.y_j)."""
    if pair.dimension != s.dimension:
        raise ValueError("pair and scatterers have different dimensions")
    if s.count == 0:
        return 0j
    q = solve_charges(s, pair.k).values
    return complex(np.sum(q * np.exp(-1j * (s.points @ pair.l))) / (2 * np.pi) ** s.dimension)


def scattered_field(s: ScattererSet, x, k, charges: np.ndarray | None = None):
    """psi_sc(x, k) = sum_j q_j(k) G+(x - y_j, kappa) for x of shape (..., d)."""
    d = s.dimension
    x = as_points(x, d)
    k = as_points(k, d).reshape(d)
    kappa = float(np.linalg.norm(k))
    if s.count == 0:
        out = np.zeros(x.shape[:-1], dtype=complex)
        return complex(out) if out.ndim == 0 else out
    q = solve_charges(s, k).values if charges is None else np.asarray(charges, dtype=complex)
    r = np.linalg.norm(x[..., None, :] - s.points, axis=-1)
    if d > 1 and np.any(r < COINCIDENCE_TOL):
        raise SingularityError("field evaluated at a scatterer location")
    out = np.sum(q * green_plus_radial(r, kappa, d), axis=-1)
    return complex(out) if np.ndim(out) == 0 else out


def total_field(s: ScattererSet, x, k):
    """psi+(x, k) = exp(i k.x) + psi_sc(x, k)."""
    d = s.dimension
    xa = as_points(x, d)
    ka = as_points(k, d).reshape(d)
    return np.exp(1j * (xa @ ka)) + scattered_field(s, x, k)


def gamma_convention(p, d: int) -> np.ndarray:
    """Fixed unit vector field gamma(p) orthogonal to p.

    d = 2: gamma(p) = (-p2, p1)/|p|, gamma(0) = (0, 1).
    d = 3: gamma(p) = normalize(e x p), e the basis vector least aligned with
    p (lowest index on ties), gamma(0) = (0, 0, 1). For p along e3 this gives
    e1 x e3 = -e2, i.e. gamma = (0, -1, 0).

    ``p`` may be a single vector or an array of shape (m, d).
    """
    if d not in (2, 3):
        raise ValueError("gamma convention is defined for d = 2, 3")
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    p = p.reshape(-1, d)
    norm = np.linalg.norm(p, axis=1)
    zero = norm == 0
    if d == 2:
        g = np.stack([-p[:, 1], p[:, 0]], axis=1)
        g[zero] = (0.0, 1.0)
    else:
        idx = np.argmin(np.abs(p), axis=1)
        e = np.zeros_like(p)
        e[np.arange(p.shape[0]), idx] = 1.0
        g = np.cross(e, p)
        g[zero] = (0.0, 0.0, 1.0)
    g = g / np.linalg.norm(g, axis=1, keepdims=True)
    return g[0] if single else g


def manifold_pairs(p, energy: float, gamma: np.ndarray | None = None):
    """Vectorized k_E(p) = p/2 + m_E(p), l_E(p) = -p/2 + m_E(p); returns (ks, ls)."""
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    d = p.shape[-1]
    p = p.reshape(-1, d)
    p2 = np.sum(p * p, axis=1)
    if np.any(p2 >= 4 * energy):
        raise ValueError("every p must satisfy |p| < 2 sqrt(E)")
    g = gamma_convention(p, d) if gamma is None else np.asarray(gamma, dtype=float).reshape(-1, d)
    m = np.sqrt(energy - p2 / 4)[:, None] * g
    ks, ls = p / 2 + m, -p / 2 + m
    if single:
        return ks[0], ls[0]
    return ks, ls


def manifold_amplitudes(s: ScattererSet, p, energy: float, system: FactorizedSystem | None = None) -> np.ndarray:
    """f(k_E(p), l_E(p)) for each row of ``p``, evaluated without forming k and l.

    With k = p/2 + m and l = -p/2 + m the phase k.y_j' - l.y_j equals
    (p/2).(y_j + y_j') + m.(y_j' - y_j). The diagonal terms then carry only
    the O(|p|) phase, so the result keeps full relative accuracy when
    kappa |y| is far beyond 1/eps, where ``amplitudes`` loses p.y to rounding.
    """
    d = s.dimension
    p = np.asarray(p, dtype=float).reshape(-1, d)
    energy = float(energy)
    p2 = np.sum(p * p, axis=1)
    if np.any(p2 >= 4 * energy):
        raise ValueError("every p must satisfy |p| < 2 sqrt(E)")
    if s.count == 0:
        return np.zeros(p.shape[0], dtype=complex)
    if system is None:
        system = FactorizedSystem(s, np.sqrt(energy))
    ainv = system.solve(np.eye(s.count, dtype=complex))
    m = np.sqrt(energy - p2 / 4)[:, None] * gamma_convention(p, d)
    y = s.points
    out = np.zeros(p.shape[0], dtype=complex)
    for j in range(s.count):
        for jp in range(s.count):
            phase = p @ ((y[j] + y[jp]) / 2)
            if jp != j:
                phase = phase + m @ (y[jp] - y[j])
            out -= ainv[j, jp] * np.exp(1j * phase)
    return out / (2 * np.pi) ** d


def manifold_points(g: ProbeGeometry) -> WavePair:
    k, l = manifold_pairs(g.p, g.energy, g.gamma)
    return WavePair(k, l)


def farfield_defects(s: ScattererSet, k, xhat, radii) -> np.ndarray:
    """|R^((d-1)/2) exp(-i kappa R) psi_sc(R xhat, k) - c(d, kappa) f(k, kappa xhat)| per radius R."""
    d = s.dimension
    k = as_points(k, d).reshape(d)
    xhat = as_points(xhat, d).reshape(d)
    if abs(np.linalg.norm(xhat) - 1) > 1e-12:
        raise ValueError("xhat must be a unit vector")
    kappa = float(np.linalg.norm(k))
    radii = np.asarray(radii, dtype=float).reshape(-1)
    q = solve_charges(s, k).values
    l = kappa * xhat
    target = farfield_constant(d, kappa) * (np.sum(q * np.exp(-1j * (s.points @ l))) / (2 * np.pi) ** d)
    field = scattered_field(s, radii[:, None] * xhat, k, charges=q)
    return np.abs(radii ** ((d - 1) / 2) * np.exp(-1j * kappa * radii) * field - target)
