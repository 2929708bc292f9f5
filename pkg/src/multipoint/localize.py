"""Point-mass localization from samples of a Fourier transform.

The field model is

    F(p) = (2 pi)^-d sum_j c_j exp(i p.y_j)

sampled on a Cartesian grid over [-P, P]^d. Peaks of the adjoint image
I(x) = sum_p exp(-i p.x) F(p) dp^d seed a damped Gauss-Newton fit of the
positions y_j and complex amplitudes c_j.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

__all__ = [
    "UnresolvedPair",
    "LocalizationError",
    "CartesianGrid",
    "PointMass",
    "cartesian_grid",
    "field_model",
    "adjoint_image",
    "pick_peaks",
    "refine_point_masses",
    "fit_amplitudes",
    "localize_point_masses",
]


class UnresolvedPair(UserWarning):
    """Two accepted peaks are closer than the resolution limit pi/P."""


class LocalizationError(RuntimeError):
    def __init__(self, message: str, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


@dataclass(frozen=True)
class CartesianGrid:
    """Tensor grid of momentum samples; ``points`` are in C ('ij') order."""

    axes: tuple

    @property
    def dimension(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(len(a) for a in self.axes)

    @property
    def spacing(self) -> float:
        return float(self.axes[0][1] - self.axes[0][0])

    @property
    def pmax(self) -> float:
        return float(max(np.abs(a).max() for a in self.axes))

    @property
    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @classmethod
    def from_points(cls, points, rtol: float = 1e-9) -> "CartesianGrid":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        axes = tuple(np.unique(np.round(pts[:, i], 12)) for i in range(pts.shape[1]))
        grid = cls(axes)
        if len(pts) != np.prod(grid.shape) or not np.allclose(grid.points, pts, rtol=rtol, atol=1e-12):
            raise ValueError("p samples do not form a full Cartesian grid in 'ij' order")
        steps = np.concatenate([np.diff(a) for a in axes])
        if steps.size == 0 or np.ptp(steps) > 1e-9 * steps.max():
            raise ValueError("p grid must be uniformly spaced with one common spacing")
        return grid


def cartesian_grid(pmax: float, spacing: float, d: int) -> CartesianGrid:
    """Symmetric grid -pmax..pmax (inclusive) with the given spacing."""
    m = int(round(pmax / spacing))
    axis = spacing * np.arange(-m, m + 1)
    return CartesianGrid(tuple(axis.copy() for _ in range(d)))


@dataclass(frozen=True)
class PointMass:
    position: np.ndarray
    amplitude: complex
    peak_height: float = float("nan")


def field_model(points, amplitudes, p) -> np.ndarray:
    """(2 pi)^-d sum_j c_j exp(i p.y_j) at momenta ``p`` of shape (m, d)."""
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    p = p.reshape(-1, d)
    c = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if c.size == 0:
        return np.zeros(p.shape[0], dtype=complex)
    y = np.asarray(points, dtype=float).reshape(c.size, d)
    return np.exp(1j * (p @ y.T)) @ c / (2 * np.pi) ** d


def _axis_grid(lo: float, hi: float, h: float) -> np.ndarray:
    m = max(int(np.ceil((hi - lo) / h)), 1)
    return np.linspace(lo, hi, m + 1)


def adjoint_image(grid: CartesianGrid, values, search_box, oversample: float = 4.0):
    """I(x) on a grid over ``search_box`` with spacing <= (pi/P)/oversample.

    Returns the list of x axes and the complex image of shape (len(x1), ...).
    """
    d = grid.dimension
    box = np.asarray(search_box, dtype=float).reshape(d, 2)
    h = np.pi / grid.pmax / oversample
    xaxes = [_axis_grid(lo, hi, h) for lo, hi in box]
    img = np.asarray(values, dtype=complex).reshape(grid.shape)
    for axis in range(d):
        kern = np.exp(-1j * np.outer(grid.axes[axis], xaxes[axis]))  # (Np_axis, Nx_axis)
        img = np.tensordot(img, kern, axes=([0], [0]))  # contracted axis moves to the end
    return xaxes, img * grid.spacing**d


def pick_peaks(xaxes, image, threshold: float, n_max: int, min_separation: float = 0.0):
    """Local maxima of |image| above ``threshold`` (absolute), highest first.

    Maxima within ``min_separation`` of a higher accepted one are dropped,
    which also collapses plateaus of tied samples. Returns positions (m, d),
    heights (m,) and image indices (m, d).
    """
    mag = np.abs(image)
    local = mag == ndimage.maximum_filter(mag, size=3, mode="nearest")
    idx = np.argwhere(local & (mag >= threshold) & (mag > 0))
    heights = mag[tuple(idx.T)]
    order = np.argsort(-heights, kind="stable")
    idx = idx[order]
    heights = heights[order]
    pos = np.stack([np.asarray(xaxes[a])[idx[:, a]] for a in range(len(xaxes))], axis=1)
    keep = []
    for i in range(len(pos)):
        if len(keep) == n_max:
            break
        if all(np.linalg.norm(pos[i] - pos[j]) > min_separation for j in keep):
            keep.append(i)
    keep = np.asarray(keep, dtype=int)
    return pos[keep].reshape(-1, len(xaxes)), heights[keep], idx[keep].reshape(-1, len(xaxes))


def _pack(y, c):
    return np.concatenate([y.ravel(), c.real, c.imag])


def _unpack(theta, n, d):
    y = theta[: n * d].reshape(n, d)
    c = theta[n * d : n * d + n] + 1j * theta[n * d + n :]
    return y, c


def refine_point_masses(p, values, y0, c0, max_iter: int = 100, tol: float = 1e-12):
    """Damped Gauss-Newton (Levenberg-Marquardt) fit of positions and amplitudes.

    Minimizes sum_p |F_model(p) - values(p)|^2. Returns (y, c, residual_norm, iterations).
    """
    p = np.asarray(p, dtype=float)
    values = np.asarray(values, dtype=complex).ravel()
    y = np.array(y0, dtype=float, copy=True)
    c = np.array(c0, dtype=complex, copy=True)
    n, d = y.shape
    norm = (2 * np.pi) ** -d

    def residual(y, c):
        e = np.exp(1j * (p @ y.T))
        return norm * (e @ c) - values, e

    r, e = residual(y, c)
    cost = np.vdot(r, r).real
    lam = 1e-3
    for it in range(1, max_iter + 1):
        # columns: d position derivatives per mass, then Re c, Im c
        jac = np.empty((p.shape[0], n * d + 2 * n), dtype=complex)
        for j in range(n):
            for a in range(d):
                jac[:, j * d + a] = norm * 1j * p[:, a] * c[j] * e[:, j]
        jac[:, n * d : n * d + n] = norm * e
        jac[:, n * d + n :] = norm * 1j * e
        jr = np.vstack([jac.real, jac.imag])
        rr = np.concatenate([r.real, r.imag])
        jtj = jr.T @ jr
        g = jr.T @ rr
        scale = np.sqrt(np.maximum(np.diag(jtj), 1e-300))
        theta = _pack(y, c)
        while True:
            a = jtj + lam * np.diag(scale**2)
            step = -np.linalg.solve(a, g)
            y_new, c_new = _unpack(theta + step, n, d)
            r_new, e_new = residual(y_new, c_new)
            cost_new = np.vdot(r_new, r_new).real
            if cost_new <= cost:
                break
            lam *= 10
            if lam > 1e12:
                step = np.zeros_like(step)
                y_new, c_new, r_new, e_new, cost_new = y, c, r, e, cost
                break
        y, c, r, e = y_new, c_new, r_new, e_new
        converged = (
            np.linalg.norm(step) <= tol * (1 + np.linalg.norm(theta))
            or cost - cost_new <= tol**2 * max(cost, 1e-300)
        )
        cost = cost_new
        lam = max(lam / 10, 1e-12)
        if converged:
            return y, c, float(np.sqrt(cost)), it
    raise LocalizationError(
        f"Gauss-Newton did not converge in {max_iter} iterations", last_iterate=(y, c)
    )


def fit_amplitudes(p, values, positions) -> tuple[np.ndarray, float]:
    """Linear least-squares amplitudes c_j for fixed positions; returns (c, residual_norm)."""
    p = np.asarray(p, dtype=float)
    y = np.asarray(positions, dtype=float).reshape(-1, p.shape[1])
    values = np.asarray(values, dtype=complex).ravel()
    if y.shape[0] == 0:
        return np.zeros(0, dtype=complex), float(np.linalg.norm(values))
    design = np.exp(1j * (p @ y.T)) / (2 * np.pi) ** p.shape[1]
    if np.linalg.matrix_rank(design) < y.shape[0]:
        raise np.linalg.LinAlgError("amplitude design matrix is rank deficient")
    c, *_ = np.linalg.lstsq(design, values, rcond=None)
    return c, float(np.linalg.norm(design @ c - values))


@dataclass
class LocalizationResult:
    masses: list
    residual_norm: float
    warnings: list = field(default_factory=list)


def localize_point_masses(
    grid: CartesianGrid,
    values,
    search_box,
    n_max: int = 32,
    threshold: float = 0.5,
    deflation_floor: float = 1e-3,
    min_gain: float = 0.95,
    max_iter: int = 100,
) -> LocalizationResult:
    """Detect and refine point masses in a sampled Fourier field.

    Peaks above ``threshold`` times the image maximum are accepted and
    refined jointly by Gauss-Newton. The residual field is then re-imaged
    and its strongest peak is tried as one more mass: it is kept when the
    refit shrinks the residual norm by at least the factor ``min_gain``.
    Deflation stops at the first rejected candidate or once the residual
    image falls below ``deflation_floor`` times the original maximum.
    """
    values = np.asarray(values, dtype=complex).ravel()
    p = grid.points
    d = grid.dimension
    box = np.asarray(search_box, dtype=float).reshape(d, 2)
    notes = []
    if np.any(box[:, 1] - box[:, 0] >= 2 * np.pi / grid.spacing):
        notes.append("search box exceeds the alias period 2 pi/dp of the p grid")
    xaxes, image = adjoint_image(grid, values, box)
    peak_max = float(np.abs(image).max()) if image.size else 0.0
    if peak_max == 0.0:
        return LocalizationResult([], float(np.linalg.norm(values)), notes)
    weight = grid.spacing**d * len(p) / (2 * np.pi) ** d  # image height per unit amplitude
    limit = np.pi / grid.pmax
    pos, heights, idx = pick_peaks(xaxes, image, threshold * peak_max, n_max, 0.5 * limit)
    y, c, res_norm, _ = refine_point_masses(p, values, pos, image[tuple(idx.T)] / weight, max_iter=max_iter)
    resid = values - field_model(y, c, p)
    while len(c) < n_max:
        _, image = adjoint_image(grid, resid, box)
        pos, h, idx = pick_peaks(xaxes, image, deflation_floor * peak_max, n_max, 0.5 * limit)
        # residual structure next to an accepted mass is refit error, not a new mass
        gap = np.linalg.norm(pos[:, None, :] - y[None, :, :], axis=-1).min(axis=1)
        pos, h, idx = pos[gap >= limit], h[gap >= limit], idx[gap >= limit]
        if len(pos) == 0:
            break
        try:
            y_try, c_try, norm_try, _ = refine_point_masses(
                p, values, np.vstack([y, pos[:1]]), np.append(c, image[tuple(idx[0])] / weight), max_iter=max_iter
            )
        except LocalizationError:
            break
        if norm_try > min_gain * res_norm:
            break
        y, c, res_norm = y_try, c_try, norm_try
        heights = np.append(heights, h[0])
        resid = values - field_model(y, c, p)
    res_norm = float(np.linalg.norm(resid))
    for i in range(len(c)):
        for j in range(i + 1, len(c)):
            if np.linalg.norm(y[i] - y[j]) < limit:
                msg = f"peaks {i} and {j} closer than pi/P = {limit:.4g}"
                notes.append(msg)
                warnings.warn(msg, UnresolvedPair, stacklevel=2)
    masses = [PointMass(y[i].copy(), complex(c[i]), float(heights[i])) for i in range(len(c))]
    return LocalizationResult(masses, res_norm, notes)
