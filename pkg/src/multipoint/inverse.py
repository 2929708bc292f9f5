"""High-energy reconstruction of multipoint potentials from the amplitude.

d = 2 and d = 3 work on data f(k_E(p), l_E(p)) sampled on a Cartesian
p grid across an energy ladder; d = 1 works on backscattering data
f(p/2, -p/2) over a band 2 sqrt(E0) < |p| <= P.

Amplitude conventions (F v = (2 pi)^-d sum c_j exp(i p.y_j)):

    v_11 : c_j = -1/alpha_j
    v_21 : c_j = -2 pi
    v_22 : c_j = 4 pi^2 (alpha_j - i/4)
    v_31 : c_j = -4 pi i
    v_321: c_j = -16 pi^2 alpha_j
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import special

from .asymptotics import cross_term_f322
from .direct import (
    ScattererSet,
    SingularSystem,
    WavePair,
    amplitudes,
    factorize,
    manifold_amplitudes,
    manifold_pairs,
)
from .localize import (
    CartesianGrid,
    field_model,
    fit_amplitudes,
    localize_point_masses,
    refine_point_masses,
)

log = logging.getLogger(__name__)

__all__ = [
    "GAMMA_CONVENTION_ID",
    "DEFAULT_LADDER_D2",
    "DEFAULT_LADDER_D3",
    "ConditioningError",
    "ConsistencyError",
    "FieldRole",
    "AmplitudeDataset",
    "FourierCoefficientField",
    "ReconstructionReport",
    "BandLimitedReconstruction",
    "generate_dataset",
    "fit_energy_coefficients",
    "fit_energy_coefficients_batch",
    "delta_amplitude",
    "strength_from_amplitude",
    "reconstruct_d2",
    "reconstruct_d3",
    "stage2_field",
    "second_order_cross_term",
    "backscatter_samples",
    "reconstruct_d1",
]

GAMMA_CONVENTION_ID = "least-aligned-basis-cross/v1"
DEFAULT_LADDER_D2 = tuple(float(np.exp(t)) for t in range(6, 25, 2))  # kappa
DEFAULT_LADDER_D3 = (200.0, 400.0, 800.0, 1600.0, 3200.0)  # kappa


class ConditioningError(np.linalg.LinAlgError):
    """Energy regression or amplitude fit is (numerically) rank deficient."""


class ConsistencyError(RuntimeError):
    """Position sets recovered from two coefficient fields disagree."""


class FieldRole(str, Enum):
    Fv21 = "Fv21"
    Fv22 = "Fv22"
    Fv31 = "Fv31"
    Fv321 = "Fv321"
    Fv11_band = "Fv11_band"


# amplitude c_j of each delta representation
_DELTA_C = {
    FieldRole.Fv21: lambda alpha: -2 * np.pi + 0 * alpha,
    FieldRole.Fv22: lambda alpha: 4 * np.pi**2 * (alpha - 0.25j),
    FieldRole.Fv31: lambda alpha: -4j * np.pi + 0 * alpha,
    FieldRole.Fv321: lambda alpha: -16 * np.pi**2 * alpha,
    FieldRole.Fv11_band: lambda alpha: -1 / alpha,
}


def delta_amplitude(role: FieldRole, alpha) -> np.ndarray:
    """c_j carried by the field ``role`` for strengths ``alpha``."""
    return _DELTA_C[FieldRole(role)](np.asarray(alpha, dtype=complex))


def strength_from_amplitude(role: FieldRole, c) -> np.ndarray:
    """Invert :func:`delta_amplitude` for the roles that carry alpha."""
    role = FieldRole(role)
    c = np.asarray(c, dtype=complex)
    if role is FieldRole.Fv22:
        return c / (4 * np.pi**2) + 0.25j
    if role is FieldRole.Fv321:
        return -c / (16 * np.pi**2)
    if role is FieldRole.Fv11_band:
        return -1 / c
    raise ValueError(f"field {role.value} does not carry the strengths")


@dataclass(frozen=True)
class AmplitudeDataset:
    """Samples ``samples[e, i] = f(k_E(p_i), l_E(p_i))`` at E = energies[e]."""

    dimension: int
    p_grid: np.ndarray
    energies: np.ndarray
    samples: np.ndarray
    gamma_convention: str = GAMMA_CONVENTION_ID

    def __post_init__(self):
        d = int(self.dimension)
        if d not in (2, 3):
            raise ValueError("amplitude datasets on the (p, E) manifold need d = 2 or 3")
        p = np.asarray(self.p_grid, dtype=float).reshape(-1, d)
        e = np.asarray(self.energies, dtype=float).reshape(-1)
        f = np.asarray(self.samples, dtype=complex)
        if f.shape != (e.size, p.shape[0]):
            raise ValueError(f"samples must have shape {(e.size, p.shape[0])}, got {f.shape}")
        if np.any(e <= 0):
            raise ValueError("energies must be positive")
        pmax2 = float(np.max(np.sum(p * p, axis=1))) if p.size else 0.0
        if np.any(pmax2 >= 4 * e):
            raise ValueError("dataset violates |p| < 2 sqrt(E)")
        if not np.all(np.isfinite(f)):
            raise ValueError("dataset samples must be finite and complete")
        object.__setattr__(self, "dimension", d)
        object.__setattr__(self, "p_grid", p)
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "samples", f)

    @property
    def kappas(self) -> np.ndarray:
        return np.sqrt(self.energies)

    @property
    def grid(self) -> CartesianGrid:
        return CartesianGrid.from_points(self.p_grid)


@dataclass(frozen=True)
class FourierCoefficientField:
    p_grid: np.ndarray
    values: np.ndarray
    role: FieldRole

    def conjugate_symmetry_defect(self) -> float:
        """max |F(-p) - conj F(p)| over grid points whose mirror is sampled."""
        p = np.round(np.asarray(self.p_grid), 12)
        index = {tuple(row): i for i, row in enumerate(p)}
        worst = 0.0
        for i, row in enumerate(p):
            j = index.get(tuple(-row))
            if j is not None:
                worst = max(worst, abs(self.values[j] - np.conj(self.values[i])))
        return worst


@dataclass
class ReconstructionReport:
    recovered: ScattererSet
    stage_residuals: dict = field(default_factory=dict)
    localization: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


def generate_dataset(s: ScattererSet, p_grid, energies) -> AmplitudeDataset:
    """Exact amplitudes on the parameterized manifold via the direct solver."""
    d = s.dimension
    p = np.asarray(p_grid, dtype=float).reshape(-1, d)
    energies = np.asarray(energies, dtype=float).reshape(-1)
    samples = np.empty((energies.size, p.shape[0]), dtype=complex)
    for e, energy in enumerate(energies):
        if np.any(np.sum(p * p, axis=1) >= 4 * energy):
            raise ValueError(f"p grid not admissible at E = {energy:.6g}: need |p| < 2 sqrt(E)")
        kappa = np.sqrt(energy)
        try:
            system = factorize(s, kappa)
        except SingularSystem as exc:
            raise SingularSystem(exc.kappa, exc.condition_estimate, f"dataset generation failed at kappa={kappa:.12g}") from exc
        samples[e] = manifold_amplitudes(s, p, energy, system)
    return AmplitudeDataset(d, p, energies, samples)


def _energy_variable(energies, dimension: int) -> np.ndarray:
    kappa = np.sqrt(np.asarray(energies, dtype=float))
    if dimension == 2:
        if np.any(kappa <= 1):
            raise ValueError("d = 2 regression needs kappa > 1")
        return 1 / np.log(kappa)
    return 1 / kappa


def fit_energy_coefficients_batch(
    energies, samples, dimension: int, fit_order: int, lowest_power: int = 1, weights=None
) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares f ~ sum_{m=lowest_power..fit_order} a_m s^m for every column of ``samples``.

    s = 1/ln(kappa) for d = 2 and 1/kappa otherwise. ``weights`` (one per
    energy) scale the rows of the fit. Returns (a, residual_norms) with a of
    shape (fit_order - lowest_power + 1, n_columns); residuals are unweighted.
    """
    energies = np.asarray(energies, dtype=float).reshape(-1)
    f = np.asarray(samples, dtype=complex)
    if f.ndim == 1:
        f = f[:, None]
    powers = np.arange(lowest_power, fit_order + 1)
    if powers.size == 0:
        raise ValueError("fit_order must be at least lowest_power")
    if np.unique(energies).size < powers.size + 1:
        raise ConditioningError(f"need at least {powers.size + 1} distinct energies for {powers.size} coefficients")
    s = _energy_variable(energies, dimension)
    design = s[:, None] ** powers
    # column scaling keeps the Vandermonde condition number honest
    w = np.ones(energies.size) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
    if w.shape != energies.shape or not np.all(w > 0):
        raise ValueError("weights must be positive, one per energy")
    w = w / w.max()
    scale = np.abs(design).max(axis=0)
    ds = design / scale * w[:, None]
    cond = np.linalg.cond(ds)
    if not cond < 1e10:
        raise ConditioningError(f"energy design matrix ill-conditioned (cond {cond:.3e})")
    coef, *_ = np.linalg.lstsq(ds, f * w[:, None], rcond=None)
    coef = coef / scale[:, None]
    resid = np.linalg.norm(design @ coef - f, axis=0)
    return coef, resid


def fit_energy_coefficients(series, dimension: int, fit_order: int) -> np.ndarray:
    """Energy-scale coefficients a_1..a_fit_order at a single p from pairs (E, f)."""
    series = list(series)
    energies = np.array([e for e, _ in series], dtype=float)
    values = np.array([v for _, v in series], dtype=complex)
    coef, _ = fit_energy_coefficients_batch(energies, values, dimension, fit_order)
    return coef[:, 0]


def second_order_cross_term(y_list, pair: WavePair, kappa: float | None = None) -> complex:
    """The oscillatory kappa^-2 cross term between distinct scatterers (d = 3)."""
    kappa = pair.kappa if kappa is None else float(kappa)
    return cross_term_f322(y_list, pair.k, pair.l, kappa)


def _default_box(d: int) -> np.ndarray:
    return np.tile([-1.5, 1.5], (d, 1))


def _masses_to_records(result, role: FieldRole):
    return [
        {
            "role": role.value,
            "position": m.position.tolist(),
            "amplitude": [m.amplitude.real, m.amplitude.imag],
            "peak_height": m.peak_height,
        }
        for m in result.masses
    ]


def _match_positions(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    if len(a) != len(b):
        return False
    if len(a) == 0:
        return True
    dist = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    return bool(np.all(dist.min(axis=1) < tol) and np.all(dist.min(axis=0) < tol))


def _resummed_d2_strengths(ds: AmplitudeDataset, positions: np.ndarray):
    """alpha_j from per-energy amplitudes c_j(kappa) = -1/(ln(kappa)/(2 pi) + alpha_j - i/4).

    This is the (ln kappa)^-1 charge expansion summed to all orders, which is
    exact up to the O(kappa^-1/2) Hankel couplings between distinct points.
    """
    t = np.log(ds.kappas) / (2 * np.pi)
    z = np.empty((len(t), len(positions)), dtype=complex)
    for e in range(len(t)):
        c, _ = fit_amplitudes(ds.p_grid, ds.samples[e], positions)
        z[e] = -1 / c - t[e]
    # each z_e carries an O(kappa^-1/2) error from the couplings between points
    w = np.sqrt(ds.kappas)
    return (w @ z) / w.sum() + 0.25j, z


def reconstruct_d2(
    ds: AmplitudeDataset,
    search_box=None,
    fit_order: int = 3,
    amplitude_method: str = "resummed",
    threshold: float = 0.5,
    n_max: int = 32,
) -> ReconstructionReport:
    """Recover (n, y_j, alpha_j) in d = 2.

    Positions come from localizing the (ln kappa)^-2 coefficient field and
    are cross-checked against the (ln kappa)^-1 field. With
    ``amplitude_method="fourier"`` the strengths are read off the
    (ln kappa)^-2 field amplitudes directly; the default ``"resummed"``
    refits them energy by energy at the recovered positions.
    """
    if ds.dimension != 2:
        raise ValueError("reconstruct_d2 needs a d = 2 dataset")
    if ds.energies.size < 4:
        raise ConditioningError("d = 2 reconstruction needs at least 4 energies")
    if amplitude_method not in ("resummed", "fourier"):
        raise ValueError("amplitude_method must be 'resummed' or 'fourier'")
    box = _default_box(2) if search_box is None else np.asarray(search_box, dtype=float)
    grid = ds.grid
    # rows weighted by the inverse size of the neglected inter-point couplings,
    # O(kappa^-1/2 (ln kappa)^-2) in f
    kappa = ds.kappas
    coef, fit_res = fit_energy_coefficients_batch(
        ds.energies, ds.samples, 2, fit_order, weights=np.sqrt(kappa) * np.log(kappa) ** 2
    )
    fv21 = FourierCoefficientField(ds.p_grid, coef[0], FieldRole.Fv21)
    fv22 = FourierCoefficientField(ds.p_grid, coef[1], FieldRole.Fv22)
    loc22 = localize_point_masses(grid, fv22.values, box, n_max=n_max, threshold=threshold)
    loc21 = localize_point_masses(grid, fv21.values, box, n_max=n_max, threshold=threshold)
    y22 = np.array([m.position for m in loc22.masses]).reshape(-1, 2)
    y21 = np.array([m.position for m in loc21.masses]).reshape(-1, 2)
    resolution = np.pi / grid.pmax
    if not _match_positions(y22, y21, resolution):
        raise ConsistencyError(
            f"positions from Fv22 ({len(y22)} points) and Fv21 ({len(y21)} points) disagree beyond pi/P"
        )
    c22 = np.array([m.amplitude for m in loc22.masses], dtype=complex)
    alpha_fourier = strength_from_amplitude(FieldRole.Fv22, c22)
    diagnostics = {
        "resolution": resolution,
        "energies": ds.energies.tolist(),
        "fit_order": fit_order,
        "amplitude_method": amplitude_method,
        "alpha_from_Fv22": [[a.real, a.imag] for a in alpha_fourier],
    }
    residuals = {
        "energy_fit": float(np.linalg.norm(fit_res)),
        "localize_Fv22": loc22.residual_norm,
        "localize_Fv21": loc21.residual_norm,
    }
    if amplitude_method == "resummed" and len(y22):
        alpha, z_by_energy = _resummed_d2_strengths(ds, y22)
        residuals["resummed_spread"] = float(np.abs(z_by_energy - z_by_energy.mean(axis=0)).max())
    else:
        alpha = alpha_fourier
    recovered = ScattererSet(2, y22, alpha) if len(y22) else ScattererSet.empty(2)
    records = _masses_to_records(loc22, FieldRole.Fv22) + _masses_to_records(loc21, FieldRole.Fv21)
    return ReconstructionReport(recovered, residuals, records, diagnostics, loc22.warnings + loc21.warnings)


def reconstruct_d3(
    ds: AmplitudeDataset,
    search_box=None,
    threshold: float = 0.5,
    n_max: int = 32,
    positions=None,
    amplitude_tol: float = 0.5,
    refine_passes: int = 2,
) -> ReconstructionReport:
    """Two-stage recovery in d = 3.

    Stage 1 reads the kappa^-1 coefficient field and localizes positions.
    Stage 2 removes the leading term and the oscillatory cross term, fits
    the kappa^-2 coefficient field and solves for the strengths at the fixed
    positions. ``positions`` bypasses Stage-1 localization. Stage-1 masses
    whose amplitude is off -4 pi i by more than ``amplitude_tol`` (relative)
    are discarded. Each of the ``refine_passes`` passes subtracts the cross
    term at the current positions from the data, refits the kappa^-1 field
    and re-runs Gauss-Newton on it, which removes the cross-term leakage that
    limits the first-pass positions.
    """
    if ds.dimension != 3:
        raise ValueError("reconstruct_d3 needs a d = 3 dataset")
    if ds.energies.size < 3:
        raise ConditioningError("d = 3 reconstruction needs at least 3 energies")
    box = _default_box(3) if search_box is None else np.asarray(search_box, dtype=float)
    grid = ds.grid
    p = ds.p_grid
    coef1, res1 = fit_energy_coefficients_batch(ds.energies, ds.samples, 3, 2)
    fv31 = FourierCoefficientField(p, coef1[0], FieldRole.Fv31)
    records, notes = [], []
    residuals = {"stage1_energy_fit": float(np.linalg.norm(res1))}
    if positions is None:
        loc = localize_point_masses(grid, fv31.values, box, n_max=n_max, threshold=threshold)
        records += _masses_to_records(loc, FieldRole.Fv31)
        notes += loc.warnings
        # every genuine mass of this field carries c = -4 pi i; midpoint ghosts from
        # the oscillatory cross term leaking into the fit carry a tiny amplitude
        c_ref = complex(delta_amplitude(FieldRole.Fv31, 1.0))
        kept = []
        for m in loc.masses:
            if abs(m.amplitude / c_ref - 1) <= amplitude_tol:
                kept.append(m.position)
            else:
                notes.append(f"discarded Fv31 mass at {m.position.round(6).tolist()} with amplitude {m.amplitude:.3g}")
        y = np.array(kept).reshape(-1, 3)
        residuals["stage1_localize"] = loc.residual_norm
        if len(y) and refine_passes > 0:
            y_first = y
            y = _refine_stage1(ds, y, refine_passes)
            residuals["stage1_refine_shift"] = float(np.linalg.norm(y - y_first, axis=1).max())
    else:
        y = np.asarray(positions, dtype=float).reshape(-1, 3)
    diagnostics = {"resolution": np.pi / grid.pmax, "energies": ds.energies.tolist()}
    if len(y) == 0:
        return ReconstructionReport(ScattererSet.empty(3), residuals, records, diagnostics, notes)
    fv321, res2 = stage2_field(ds, y)
    try:
        c321, res_amp = fit_amplitudes(p, fv321.values, y)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"stage-2 amplitude fit failed: {exc}") from exc
    alpha = strength_from_amplitude(FieldRole.Fv321, c321)
    residuals.update({"stage2_energy_fit": res2, "stage2_amplitudes": res_amp})
    for j in range(len(y)):
        records.append({
            "role": FieldRole.Fv321.value,
            "position": y[j].tolist(),
            "amplitude": [c321[j].real, c321[j].imag],
            "peak_height": None,
        })
    return ReconstructionReport(ScattererSet(3, y, alpha), residuals, records, diagnostics, notes)


def _cross_term_table(ds: AmplitudeDataset, y: np.ndarray) -> np.ndarray:
    out = np.empty_like(ds.samples)
    for e, energy in enumerate(ds.energies):
        ks, ls = manifold_pairs(ds.p_grid, energy)
        out[e] = cross_term_f322(y, ks, ls, np.sqrt(energy))
    return out


def _refine_stage1(ds: AmplitudeDataset, y: np.ndarray, passes: int) -> np.ndarray:
    c = np.full(len(y), complex(delta_amplitude(FieldRole.Fv31, 1.0)))
    for _ in range(passes):
        cleaned = ds.samples - _cross_term_table(ds, y) / ds.energies[:, None]
        coef, _ = fit_energy_coefficients_batch(ds.energies, cleaned, 3, 2)
        y, _, _, _ = refine_point_masses(ds.p_grid, coef[0], y, c)
    return y


def stage2_field(ds: AmplitudeDataset, positions) -> tuple[FourierCoefficientField, float]:
    """Fit the kappa^-2 coefficient field in d = 3 at known positions.

    The leading field is rebuilt from ``positions`` with its exact amplitude
    -4 pi i and removed together with the oscillatory cross term; the
    remainder g = kappa^2 (f - kappa^-1 Fv31) - f322 is fitted as
    b1 + b2/kappa + b3/kappa^2, the last term being the guard order.
    Returns the b1 field and the fit residual norm.
    """
    y = np.asarray(positions, dtype=float).reshape(-1, 3)
    p = ds.p_grid
    kappa = ds.kappas
    e_p = np.exp(1j * (p @ y.T))
    fv31_hat = e_p @ np.full(len(y), complex(delta_amplitude(FieldRole.Fv31, 1.0))) / (2 * np.pi) ** 3
    g = kappa[:, None] ** 2 * (ds.samples - fv31_hat[None, :] / kappa[:, None]) - _cross_term_table(ds, y)
    # the guard term needs a fourth energy; three energies fit b1 + b2/kappa only
    order = 2 if np.unique(ds.energies).size >= 4 else 1
    coef, res = fit_energy_coefficients_batch(ds.energies, g, 3, order, lowest_power=0)
    return FourierCoefficientField(p, coef[0], FieldRole.Fv321), float(np.linalg.norm(res))


def backscatter_samples(s: ScattererSet, p_values) -> np.ndarray:
    """f(p/2, -p/2) in d = 1 for each momentum transfer p (kappa = |p|/2)."""
    if s.dimension != 1:
        raise ValueError("backscatter samples are defined for d = 1")
    p_values = np.asarray(p_values, dtype=float).reshape(-1)
    out = np.empty(p_values.size, dtype=complex)
    for i, pv in enumerate(p_values):
        if pv == 0:
            raise ValueError("p = 0 has kappa = 0")
        kappa = abs(pv) / 2
        try:
            system = factorize(s, kappa)
        except SingularSystem as exc:
            raise SingularSystem(exc.kappa, exc.condition_estimate, f"backscatter sample failed at kappa={kappa:.12g}") from exc
        out[i] = amplitudes(s, [[pv / 2]], [[-pv / 2]], system)[0]
    return out


@dataclass
class BandLimitedReconstruction:
    x: np.ndarray
    profile: np.ndarray
    peaks: list
    diagnostics: dict = field(default_factory=dict)


def reconstruct_d1(
    p_values,
    backscatter,
    E0: float,
    P: float,
    x_range=(-2.0, 2.0),
    threshold: float = 0.1,
    n_max: int = 32,
    oversample: float = 4.0,
) -> BandLimitedReconstruction:
    """Band-limited profile v_band(x) = sum_p exp(-i p x) f(p/2, -p/2) dp over 2 sqrt(E0) < |p| <= P.

    Peaks are extracted by deflation: the strongest peak of the residual
    profile seeds one more mass, all masses are refitted by Gauss-Newton on
    the band samples, and the fit is subtracted. Passes stop once the
    residual profile drops below ``threshold`` times the original maximum.
    Each peak's mass integrates its isolated profile (data minus the other
    fitted masses) over |x - x_peak| <= pi/P, normalized by the same
    integral of the band-pass kernel; the nominal strength is -1/mass.
    """
    p = np.asarray(p_values, dtype=float).reshape(-1)
    f = np.asarray(backscatter, dtype=complex).reshape(-1)
    if p.shape != f.shape:
        raise ValueError("p_values and backscatter must have equal length")
    p0 = 2 * np.sqrt(E0)
    band = (np.abs(p) > p0) & (np.abs(p) <= P)
    p, f = p[band], f[band]
    order = np.argsort(p)
    p, f = p[order], f[order]
    pos = p[p > 0]
    if pos.size < 2:
        raise ValueError("band contains too few samples")
    dp = float(np.median(np.diff(pos)))
    lo, hi = x_range
    if dp > np.pi / (4 * (hi - lo)) * (1 + 1e-9):
        raise ValueError(f"p spacing {dp:.4g} too coarse for x range {hi - lo:.4g}")
    h = np.pi / P / oversample
    x = np.linspace(lo, hi, int(np.ceil((hi - lo) / h)) + 1)
    kern = np.exp(-1j * np.outer(x, p)) * dp

    profile = kern @ f
    diagnostics = {"band": [p0, P], "dp": dp, "grid_spacing": float(x[1] - x[0])}
    top = float(np.abs(profile).max())
    if top == 0:
        return BandLimitedReconstruction(x, profile, [], diagnostics)
    pc = p[:, None]
    y = np.zeros((0, 1))
    c = np.zeros(0, dtype=complex)
    resid = f
    while len(c) < n_max:
        r_prof = np.abs(kern @ resid)
        i = int(np.argmax(r_prof))
        if r_prof[i] < threshold * top:
            break
        if len(c) and np.min(np.abs(y[:, 0] - x[i])) < np.pi / P:
            break
        # the band model carries the same (2 pi)^-1 normalization as the localization module
        seed = (kern[i] @ resid) / (dp * p.size) * 2 * np.pi
        y, c, _, _ = refine_point_masses(pc, f, np.vstack([y, [[x[i]]]]), np.append(c, seed))
        resid = f - field_model(y, c, pc)
    w = np.pi / P
    # integral of the band-pass kernel (1/2pi) int_band exp(ipx) dp over |x| <= w
    kernel_mass = (2 / np.pi) * (special.sici(P * w)[0] - special.sici(p0 * w)[0])
    peaks = []
    for j in np.argsort(y[:, 0]):
        others = np.arange(len(c)) != j
        isolated = kern @ (f - field_model(y[others], c[others], pc))
        window = np.abs(x - y[j, 0]) <= w
        mass = np.trapezoid(isolated[window], x[window]) / kernel_mass
        peaks.append({
            "position": float(y[j, 0]),
            "height": float(np.abs(isolated).max()),
            "mass": complex(mass),
            "alpha": complex(-1 / mass) if mass != 0 else complex("nan"),
            "fitted_mass": complex(c[j]),
        })
    return BandLimitedReconstruction(x, profile, peaks, diagnostics)
