"""Single-star wind-line synthesis: Sobolev source function, exact transfer.

The line source function is evaluated in the Sobolev approximation through
angle-averaged escape and penetration probabilities built on the
directional depth ``tau(mu) = tau_r (1 + sigma) / (1 + sigma mu^2)`` with
``sigma = dln w / dln r - 1``, while the emergent profile comes from
integrating the transfer equation exactly along rays of constant impact
parameter (the SEI scheme of Lamers, Cerruti-Sola & Perinotto 1987, ApJ
314, 726).  Rays with p < 1 carry the transmitted photospheric spectrum
and produce the blue-shifted absorption; the part of the wind behind the
star is occulted and does not contribute to them.  Rays with p >= 1 are
pure scattered emission.  Both doublet components contribute opacity and
emissivity to every formal integral, so blue-processed light feeds the red
transition along each ray.

Conventions: the dimensionless frequency is x = (c/v_inf)(lambda -
lambda_ref)/lambda_ref with lambda_ref the blue rest wavelength, the
observer sits at z -> +infinity, and material approaching the observer
absorbs at x < 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .config import NUMERIC_DEFAULTS
from .errors import ContractError, DomainError, IntegrationError, NumericError
from .wind import (
    C_KMS,
    DoubletSpec,
    WindLawParams,
    dlnw_dlnr,
    radius_at_speed,
    tau_radial,
    velocity,
)

__all__ = [
    "FrequencyGrid",
    "RayQuadrature",
    "SingleStarProfile",
    "escape_probability",
    "penetration_probability",
    "photospheric_input",
    "source_function",
    "formal_integrate_ray",
    "single_star_profile",
    "equivalent_width",
]

W_FLOOR = NUMERIC_DEFAULTS["w_floor"]
_MU_ORDER = NUMERIC_DEFAULTS["mu_quad_order"]
_MU_BREAKS = tuple(NUMERIC_DEFAULTS["mu_quad_breaks"])
_W_EDGE_CAP = NUMERIC_DEFAULTS["w_edge_cap"]

_trapz = getattr(np, "trapezoid", None) or np.trapz
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_MU_ORDER)


# ----------------------------------------------------------------------
# Grids
# ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Dimensionless frequency axis tied to a reference wavelength (Angstrom)."""

    x_values: np.ndarray
    lambda_ref: float

    def __post_init__(self):
        x = np.asarray(self.x_values, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise ContractError("frequency grid needs at least two points")
        if np.any(np.diff(x) <= 0):
            raise ContractError("frequency grid must be strictly increasing")
        if not self.lambda_ref > 0:
            raise ContractError("lambda_ref must be positive")
        object.__setattr__(self, "x_values", x)

    @classmethod
    def for_line(cls, params: WindLawParams, doublet: DoubletSpec,
                 resolution: float | None = None, pad: float | None = None
                 ) -> "FrequencyGrid":
        """Default grid covering both doublet members out to line-free continuum."""
        resolution = resolution or NUMERIC_DEFAULTS["x_resolution"]
        pad = NUMERIC_DEFAULTS["grid_pad"] if pad is None else pad
        wg = max(params.w_gauss, W_FLOOR)
        x_red = doublet.x_offset(params.v_inf)
        lo = -(1.0 + 4.0 * wg + x_red + pad)
        hi = x_red + 1.0 + 4.0 * wg + pad
        n = int(math.ceil((hi - lo) / resolution)) + 1
        return cls(lo + resolution * np.arange(n), doublet.lambda_blue)

    def refine(self, factor: int) -> "FrequencyGrid":
        n = (self.x_values.size - 1) * int(factor) + 1
        return FrequencyGrid(np.linspace(self.x_values[0], self.x_values[-1], n),
                             self.lambda_ref)

    def wavelengths(self, v_inf: float) -> np.ndarray:
        return self.lambda_ref * (1.0 + self.x_values * v_inf / C_KMS)

    @property
    def n(self) -> int:
        return self.x_values.size


@dataclass(frozen=True, eq=False)
class RayQuadrature:
    """Impact-parameter nodes and per-ray sampling for the formal solution."""

    p_core: np.ndarray
    p_halo: np.ndarray
    z_samples_per_ray: int
    p_max: float

    def __post_init__(self):
        core = np.asarray(self.p_core, dtype=float)
        halo = np.asarray(self.p_halo, dtype=float)
        if np.any(np.diff(core) <= 0) or np.any(np.diff(halo) <= 0):
            raise ContractError("impact-parameter lists must be strictly increasing")
        if core.size and (core[0] < 0 or core[-1] > 1.0):
            raise ContractError("core rays must lie in [0, 1]")
        if halo.size and (halo[0] < 1.0 or halo[-1] > self.p_max * (1 + 1e-12)):
            raise ContractError("halo rays must lie in [1, p_max]")
        if self.z_samples_per_ray < 64:
            raise ContractError("z_samples_per_ray must be at least 64")
        if not self.p_max > 1.0:
            raise ContractError("p_max must exceed the stellar radius")
        object.__setattr__(self, "p_core", core)
        object.__setattr__(self, "p_halo", halo)

    @classmethod
    def default(cls, params: WindLawParams, n_core: int | None = None,
                n_halo: int | None = None, z_samples: int | None = None
                ) -> "RayQuadrature":
        """Gauss-Legendre in p^2 across the disk, logarithmic in p - 1 outside."""
        n_core = n_core or NUMERIC_DEFAULTS["n_core_rays"]
        n_halo = n_halo or NUMERIC_DEFAULTS["n_halo_rays"]
        z_samples = z_samples or NUMERIC_DEFAULTS["z_samples_per_ray"]
        # p_max diverges as w1 -> 1; the cap trims only the outermost,
        # essentially opacity-free fringe of such winds.
        w_edge = min(params.w1, _W_EDGE_CAP)
        p_max = radius_at_speed(w_edge, params)
        nodes, _ = np.polynomial.legendre.leggauss(max(n_core - 2, 1))
        p_core = np.concatenate(([0.0], np.sqrt((nodes + 1.0) / 2.0), [1.0]))
        inner = NUMERIC_DEFAULTS["halo_inner_offset"]
        p_halo = 1.0 + np.concatenate(([0.0], np.geomspace(inner, p_max - 1.0,
                                                           n_halo - 1)))
        return cls(p_core, p_halo, int(z_samples), float(p_max))


@dataclass(frozen=True, eq=False)
class SingleStarProfile:
    """Normalized single-star line profile split into disk and halo parts.

    ``f_core`` collects the p < 1 rays (transmitted photospheric light plus
    foreground scattering), ``f_halo`` the p >= 1 pure wind emission;
    ``f_total`` is their elementwise sum and tends to 1 far from the line.
    """

    grid: FrequencyGrid
    f_core: np.ndarray
    f_halo: np.ndarray
    f_total: np.ndarray
    params: WindLawParams
    doublet: DoubletSpec

    def __post_init__(self):
        for name in ("f_core", "f_halo", "f_total"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != self.grid.x_values.shape:
                raise ContractError(f"{name} does not match the frequency grid")
            if not np.all(np.isfinite(arr)):
                raise NumericError(f"non-finite values in {name}")
            object.__setattr__(self, name, arr)
        if not np.array_equal(self.f_total, self.f_core + self.f_halo):
            raise ContractError("f_total must equal f_core + f_halo exactly")
        if np.any(self.f_core < 0) or np.any(self.f_halo < 0):
            raise NumericError("negative flux in profile components")

    def wavelengths(self) -> np.ndarray:
        return self.grid.wavelengths(self.params.v_inf)

    def to_text(self) -> str:
        meta = {
            "params": self.params.to_dict(),
            "doublet": self.doublet.to_dict(),
            "grid": {
                "lambda_ref": self.grid.lambda_ref,
                "n": int(self.grid.n),
                "x_min": float(self.grid.x_values[0]),
                "x_max": float(self.grid.x_values[-1]),
            },
        }
        lines = ["# " + json.dumps(meta)]
        for x, fc, fh in zip(self.grid.x_values, self.f_core, self.f_halo):
            lines.append(f"{float(x)!r} {float(fc)!r} {float(fh)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SingleStarProfile":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("# "):
            raise ContractError("profile table is missing its JSON header line")
        meta = json.loads(lines[0][2:])
        data = np.array([[float(v) for v in ln.split()] for ln in lines[1:]])
        grid = FrequencyGrid(data[:, 0], meta["grid"]["lambda_ref"])
        f_core, f_halo = data[:, 1], data[:, 2]
        return cls(grid, f_core, f_halo, f_core + f_halo,
                   WindLawParams.from_dict(meta["params"]),
                   DoubletSpec.from_dict(meta["doublet"]))


# ----------------------------------------------------------------------
# Sobolev probabilities and the source function
# ----------------------------------------------------------------------

def _one_minus_exp_over(tau):
    """(1 - exp(-tau)) / tau, stable at tau -> 0."""
    tau = np.asarray(tau, dtype=float)
    small = tau < 1e-7
    safe = np.where(small, 1.0, tau)
    return np.where(small, 1.0 - 0.5 * tau + tau * tau / 6.0, -np.expm1(-safe) / safe)


def _mu_integral(tau_r, sigma, mu_lo):
    """int_{mu_lo}^{1} (1 - e^{-tau(mu)})/tau(mu) dmu, composite Gauss-Legendre.

    Panels cluster toward both limits: accelerating zones (sigma > 0) vary
    fastest near mu = 0, while the sigma -> -1 limit of the far wind forms
    a boundary layer at mu = 1.
    """
    tau_r = np.asarray(tau_r, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    mu_lo = np.asarray(mu_lo, dtype=float)
    if np.any(tau_r < 0):
        raise DomainError("radial optical depth must be non-negative")
    if np.any(sigma <= -1):
        raise DomainError("sigma must exceed -1")
    tau_r, sigma, mu_lo = np.broadcast_arrays(tau_r, sigma, mu_lo)
    span = 1.0 - mu_lo
    total = np.zeros(tau_r.shape)
    amp = tau_r * (1.0 + sigma)
    for f_a, f_b in zip(_MU_BREAKS[:-1], _MU_BREAKS[1:]):
        a = mu_lo + span * f_a
        half = span * (f_b - f_a) / 2.0
        mu = a[..., None] + half[..., None] * (_GL_NODES + 1.0)
        tau = amp[..., None] / (1.0 + sigma[..., None] * mu * mu)
        total += half * np.sum(_GL_WEIGHTS * _one_minus_exp_over(tau), axis=-1)
    return total


def escape_probability(tau_r, sigma):
    """Angle-averaged escape probability for line photons.

    Equals 1 in the optically thin limit and (1 - e^{-tau_r})/tau_r for an
    isotropic velocity gradient (sigma = 0).
    """
    scalar = np.ndim(tau_r) == 0 and np.ndim(sigma) == 0
    out = _mu_integral(tau_r, sigma, 0.0)
    return float(out) if scalar else out


def penetration_probability(tau_r, sigma, r):
    """Penetration probability for continuum photons from the stellar disk.

    Only directions within the cone subtended by the photosphere
    (mu >= mu* = sqrt(1 - 1/r^2)) contribute, so this never exceeds the
    escape probability and equals half of it at the stellar surface.
    """
    scalar = np.ndim(tau_r) == 0 and np.ndim(sigma) == 0 and np.ndim(r) == 0
    r = np.asarray(r, dtype=float)
    if np.any(r < 1.0):
        raise DomainError("penetration probability defined for r >= 1 only")
    mu_star = np.sqrt(np.clip(1.0 - 1.0 / (r * r), 0.0, None))
    out = 0.5 * _mu_integral(tau_r, sigma, mu_star)
    return float(out) if scalar else out


def photospheric_input(x, params: WindLawParams, doublet: DoubletSpec):
    """Photospheric spectrum near the doublet: unit continuum minus two
    Gaussian absorption dips of depth A_phot and half-width W_phot."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x_red = doublet.x_offset(params.v_inf)
    i_star = (1.0
              - params.a_phot_blue * np.exp(-((x / params.w_phot_blue) ** 2))
              - params.a_phot_red * np.exp(-(((x - x_red) / params.w_phot_red) ** 2)))
    i_star = np.clip(i_star, 0.0, None)
    return float(i_star) if scalar else i_star


def source_function(r, params: WindLawParams, component: str, i_star):
    """Sobolev scattering source function S = (delta_c / delta) * I*.

    With the collisional term pinned to zero the source is pure scattering
    of photospheric light; in the thin limit it reduces to the geometric
    dilution factor (1 - mu*)/2 times I*.
    """
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0 and np.ndim(i_star) == 0
    if np.any(r < 1.0):
        raise DomainError("source function defined for r >= 1 only")
    r_eff = np.maximum(r, 1.0 + 1e-12)
    w = velocity(r_eff, params)
    tau_r = tau_radial(w, component, params)
    sigma = dlnw_dlnr(r_eff, params) - 1.0
    delta = _mu_integral(tau_r, sigma, 0.0)
    if np.any(delta <= 0):
        raise NumericError("escape probability vanished in source function")
    mu_star = np.sqrt(np.clip(1.0 - 1.0 / (r * r), 0.0, None))
    delta_c = 0.5 * _mu_integral(tau_r, sigma, mu_star)
    s = delta_c / delta * np.asarray(i_star, dtype=float)
    return float(s) if scalar else s


# ----------------------------------------------------------------------
# Formal solution along rays
# ----------------------------------------------------------------------

def _chord_nodes(p, z_lo, z_hi, params, n, w_edge):
    """Monotone node ladder on the chord, uniform in line-of-sight velocity.

    The resonance structure lives in u = mu_z w, which increases strictly
    along every chord, so equal-u nodes resolve all resonance zones
    without wasting samples on the empty outer wind.
    """
    if z_hi - z_lo <= 0:
        return np.array([z_lo, z_hi])
    w_dense = np.linspace(params.w0, w_edge, max(4 * n, 256))
    r_dense = radius_at_speed(w_dense, params)
    r_dense = r_dense[r_dense >= max(p, 1.0)]
    zc = np.sqrt(np.clip(r_dense * r_dense - p * p, 0.0, None))
    pool = np.concatenate([zc, -zc, [z_lo, z_hi, 0.0]])
    pool = np.unique(pool[(pool >= z_lo) & (pool <= z_hi)])
    if pool.size < 2:
        return np.array([z_lo, z_hi])
    r_pool = np.maximum(np.hypot(p, pool), 1.0 + 1e-12)
    u_pool = np.maximum.accumulate(pool / r_pool * velocity(r_pool, params))
    z = np.interp(np.linspace(u_pool[0], u_pool[-1], n), u_pool, pool)
    z[0], z[-1] = z_lo, z_hi
    return np.unique(z)


def _branch_physics(p, z, params, doublet):
    """Per-node wind state and per-component opacity prefactor and source."""
    r = np.maximum(np.hypot(p, z), 1.0 + 1e-12)
    w = velocity(r, params)
    u = z / r * w
    dln = dlnw_dlnr(r, params)
    dwdr = dln * w / r
    x_center = {"blue": 0.0, "red": doublet.x_offset(params.v_inf)}
    prefac, source = {}, {}
    for comp in ("blue", "red"):
        if params.t_tot(comp) == 0.0:
            continue
        tau_r = tau_radial(w, comp, params)
        # The wind parcel scatters photospheric light at its comoving
        # resonance, blue-shifted by its own outflow speed.
        i_star = photospheric_input(x_center[comp] - w, params, doublet)
        prefac[comp] = tau_r * dwdr
        source[comp] = source_function(r, params, comp, i_star)
    return {"z": z, "u": u, "prefac": prefac, "source": source,
            "x_center": x_center}


def _branch_spans(p, quad, occultation, photospheric):
    z_outer = math.sqrt(max(quad.p_max**2 - p * p, 0.0))
    if photospheric:
        z_surf = math.sqrt(max(1.0 - p * p, 0.0))
        if occultation:
            return [(z_surf, z_outer)]
        return [(-z_outer, -z_surf), (z_surf, z_outer)]
    return [(-z_outer, z_outer)]


def _integrate_branch(branch, x, params, incoming):
    """Carry the incoming intensity through one branch of the ray.

    First-order implicit stepping: each segment attenuates by exp(-dtau)
    and adds its opacity-weighted source times (1 - exp(-dtau)), which is
    unconditionally stable across the stiff resonance-zone opacity spikes.
    """
    if branch["z"].size < 2 or not branch["prefac"]:
        return incoming
    wg = max(params.w_gauss, W_FLOOR)
    norm = 1.0 / (wg * math.sqrt(math.pi))
    k_tot = np.zeros((branch["z"].size, x.size))
    j_tot = np.zeros_like(k_tot)
    for comp, pref in branch["prefac"].items():
        arg = (x[None, :] - branch["x_center"][comp] + branch["u"][:, None]) / wg
        k = pref[:, None] * np.exp(-arg * arg) * norm
        k_tot += k
        j_tot += k * branch["source"][comp][:, None]
    k_sum = k_tot[:-1] + k_tot[1:]
    d_tau = 0.5 * k_sum * np.diff(branch["z"])[:, None]
    s_bar = np.where(k_sum > 0, (j_tot[:-1] + j_tot[1:])
                     / np.where(k_sum > 0, k_sum, 1.0), 0.0)
    cum = np.cumsum(d_tau, axis=0)
    tau_after = cum[-1] - cum
    return (incoming * np.exp(-cum[-1])
            + np.sum(s_bar * (-np.expm1(-d_tau)) * np.exp(-tau_after), axis=0))


def _ray_intensity(p, x, params, doublet, quad, occultation, i_star,
                   photospheric):
    spans = _branch_spans(p, quad, occultation, photospheric)
    w_edge = min(params.w1, _W_EDGE_CAP)
    branches = [
        _branch_physics(p, _chord_nodes(p, lo, hi, params,
                                        quad.z_samples_per_ray, w_edge),
                        params, doublet)
        for lo, hi in spans
    ]
    if photospheric and not occultation:
        # Transparent-star diagnostic mode: the far cap radiates from zero
        # incoming intensity, and the photospheric boundary still joins at
        # the stellar surface, so the far side never shadows the star.
        out = _integrate_branch(branches[0], x, params, np.zeros_like(x))
        out = _integrate_branch(branches[1], x, params, out + i_star)
    elif photospheric:
        out = _integrate_branch(branches[0], x, params,
                                np.array(i_star, dtype=float, copy=True))
    else:
        out = _integrate_branch(branches[0], x, params, np.zeros_like(x))
    if not np.all(np.isfinite(out)):
        bad = x[~np.isfinite(out)]
        raise IntegrationError("non-finite emergent intensity", p=p,
                               x=float(bad[0]))
    return out


def formal_integrate_ray(p, x, params: WindLawParams, doublet: DoubletSpec,
                         quad: RayQuadrature | None = None,
                         occultation: bool = True):
    """Emergent intensity along one impact parameter at frequencies x.

    For p < 1 the path runs from the stellar surface toward the observer
    with the photospheric spectrum as inner boundary (material behind the
    star is occulted); for p >= 1 it crosses the full wind sphere starting
    from zero intensity.
    """
    if p < 0:
        raise DomainError("impact parameter must be non-negative")
    quad = quad or RayQuadrature.default(params)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    i_star = photospheric_input(x_arr, params, doublet)
    out = _ray_intensity(float(p), x_arr, params, doublet, quad, occultation,
                         i_star, photospheric=p < 1.0)
    return float(out[0]) if np.ndim(x) == 0 else out


def single_star_profile(params: WindLawParams, doublet: DoubletSpec,
                        grid: FrequencyGrid | None = None,
                        quad: RayQuadrature | None = None,
                        occultation: bool = True) -> SingleStarProfile:
    """Synthesize the full line profile as disk plus halo contributions.

    Fluxes are 2 int I(p, x) p dp normalized by the same trapezoid applied
    to the bare stellar disk, so a transparent wind returns the
    photospheric spectrum exactly.
    """
    grid = grid or FrequencyGrid.for_line(params, doublet)
    quad = quad or RayQuadrature.default(params)
    x = grid.x_values
    i_star = photospheric_input(x, params, doublet)

    core = np.empty((quad.p_core.size, x.size))
    for i, p in enumerate(quad.p_core):
        core[i] = _ray_intensity(float(p), x, params, doublet, quad,
                                 occultation, i_star, photospheric=True)
    halo = np.empty((quad.p_halo.size, x.size))
    for i, p in enumerate(quad.p_halo):
        halo[i] = _ray_intensity(float(p), x, params, doublet, quad,
                                 occultation, i_star, photospheric=False)

    disk_norm = _trapz(2.0 * quad.p_core, quad.p_core)
    f_core = _trapz(2.0 * quad.p_core[:, None] * core, quad.p_core, axis=0) / disk_norm
    f_halo = _trapz(2.0 * quad.p_halo[:, None] * halo, quad.p_halo, axis=0) / disk_norm
    return SingleStarProfile(grid, f_core, f_halo, f_core + f_halo,
                             params, doublet)


def equivalent_width(x, flux) -> float:
    """int (1 - f) dx: positive for net absorption, negative for net emission."""
    return float(_trapz(1.0 - np.asarray(flux, dtype=float),
                        np.asarray(x, dtype=float)))
