"""Analytic wind laws for a spherically expanding hot-star wind.

The flow follows the standard beta velocity law, and the line opacity is
prescribed through the two-exponent Sobolev optical-depth law of Lamers,
Cerruti-Sola & Perinotto (1987, ApJ 314, 726; hereafter LCP), normalized so
that the integrated radial optical depth over the line-forming speed range
equals the given total for each doublet component.

Radii are in units of the stellar radius and speeds are fractions of the
terminal speed, so everything here is dimensionless except the terminal
speed itself, which is carried only to map dimensionless frequencies onto
wavelengths.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields as _dc_fields
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import ContractError, DomainError

__all__ = [
    "C_KMS",
    "WindLawParams",
    "DoubletSpec",
    "velocity",
    "radius_at_speed",
    "dlnw_dlnr",
    "tau_radial",
    "norm_integral",
    "law_tables",
]

C_KMS = 299792.458  # speed of light [km/s]

COMPONENTS = ("blue", "red")


@dataclass(frozen=True)
class WindLawParams:
    """Parameter vector describing one star's wind and photospheric input.

    Speeds (``w0``, ``w_gauss``, ``w1``, ``w_phot_*``) are fractions of the
    terminal speed; optical depths and photospheric depths are
    dimensionless.  ``v_inf`` (km/s) only maps dimensionless frequency onto
    wavelength.  ``epsilon`` is the collisional-to-radiative ratio of the
    source function and is pinned to zero, appropriate for UV resonance
    lines of O/B stars.
    """

    w0: float
    beta: float
    w_gauss: float
    w1: float
    alpha1: float
    alpha2: float
    t_tot_blue: float
    t_tot_red: float
    a_phot_blue: float
    a_phot_red: float
    w_phot_blue: float
    w_phot_red: float
    v_inf: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.w0 < self.w1 <= 1.0:
            raise DomainError(
                f"require 0 < w0 < w1 <= 1 (got w0={self.w0}, w1={self.w1})",
                fields=["w0", "w1"],
            )
        positive = [("beta", self.beta), ("v_inf", self.v_inf),
                    ("w_phot_blue", self.w_phot_blue),
                    ("w_phot_red", self.w_phot_red)]
        for name, value in positive:
            if not value > 0.0:
                raise DomainError(f"{name} must be > 0 (got {value})", fields=[name])
        nonneg = [("w_gauss", self.w_gauss), ("alpha1", self.alpha1),
                  ("alpha2", self.alpha2), ("t_tot_blue", self.t_tot_blue),
                  ("t_tot_red", self.t_tot_red)]
        for name, value in nonneg:
            if not value >= 0.0:
                raise DomainError(f"{name} must be >= 0 (got {value})", fields=[name])
        for name, value in [("a_phot_blue", self.a_phot_blue),
                            ("a_phot_red", self.a_phot_red)]:
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1] (got {value})",
                                  fields=[name])
        if self.epsilon != 0.0:
            raise DomainError(
                f"epsilon is fixed at 0 for resonance lines (got {self.epsilon})",
                fields=["epsilon"],
            )

    def t_tot(self, component: str) -> float:
        if component == "blue":
            return self.t_tot_blue
        if component == "red":
            return self.t_tot_red
        raise ContractError(f"unknown doublet component {component!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "WindLawParams":
        names = [f.name for f in _dc_fields(cls)]
        unknown = sorted(set(data) - set(names))
        if unknown:
            raise ContractError(f"unknown WindLawParams keys: {', '.join(unknown)}",
                                fields=unknown)
        missing = sorted(set(names) - set(data) - {"epsilon"})
        if missing:
            raise ContractError(f"missing WindLawParams keys: {', '.join(missing)}",
                                fields=missing)
        return cls(**{k: float(v) for k, v in data.items()})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "WindLawParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class DoubletSpec:
    """Rest wavelengths (Angstrom) of a resonance doublet's members."""

    lambda_blue: float
    lambda_red: float
    ion_label: str = ""

    def __post_init__(self):
        if not (0.0 < self.lambda_blue < self.lambda_red):
            raise DomainError(
                "require 0 < lambda_blue < lambda_red "
                f"(got {self.lambda_blue}, {self.lambda_red})",
                fields=["lambda_blue", "lambda_red"],
            )

    def x_offset(self, v_inf: float) -> float:
        """Red-member position on the dimensionless frequency axis of the blue member."""
        return (C_KMS / v_inf) * (self.lambda_red - self.lambda_blue) / self.lambda_blue

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "DoubletSpec":
        names = {f.name for f in _dc_fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ContractError(f"unknown DoubletSpec keys: {', '.join(unknown)}",
                                fields=unknown)
        return cls(
            lambda_blue=float(data["lambda_blue"]),
            lambda_red=float(data["lambda_red"]),
            ion_label=str(data.get("ion_label", "")),
        )


def _as_array(value):
    arr = np.asarray(value, dtype=float)
    return arr, arr.ndim == 0


def _scalar_or_array(arr, scalar):
    return float(arr) if scalar else arr


def velocity(r, params: WindLawParams):
    """Wind speed w(r) = w0 + (1 - w0) (1 - 1/r)^beta.

    Strictly increasing in r, with w(1) = w0 and w -> 1 far from the star.
    """
    r, scalar = _as_array(r)
    if np.any(r < 1.0):
        raise DomainError("radius inside photosphere (r < 1)")
    w = params.w0 + (1.0 - params.w0) * (1.0 - 1.0 / r) ** params.beta
    return _scalar_or_array(w, scalar)


def radius_at_speed(w, params: WindLawParams):
    """Radius where the wind reaches speed w; analytic inverse of `velocity`."""
    w, scalar = _as_array(w)
    if np.any(w < params.w0) or np.any(w >= 1.0):
        raise DomainError(f"speed outside [w0, 1) (w0={params.w0})")
    q = (w - params.w0) / (1.0 - params.w0)
    r = 1.0 / (1.0 - q ** (1.0 / params.beta))
    return _scalar_or_array(r, scalar)


def dlnw_dlnr(r, params: WindLawParams):
    """Logarithmic velocity gradient (r/w) dw/dr, positive for all r > 1."""
    r, scalar = _as_array(r)
    if np.any(r <= 1.0):
        raise DomainError("logarithmic gradient undefined at or below r = 1")
    w = params.w0 + (1.0 - params.w0) * (1.0 - 1.0 / r) ** params.beta
    dwdr = (1.0 - params.w0) * params.beta * (1.0 - 1.0 / r) ** (params.beta - 1.0) / r**2
    return _scalar_or_array(r / w * dwdr, scalar)


@lru_cache(maxsize=512)
def _norm_integral_cached(alpha1: float, alpha2: float, beta: float, y0: float) -> float:
    def integrand(y):
        return y**alpha1 * max(1.0 - y ** (1.0 / beta), 0.0) ** alpha2

    value, _ = quad(integrand, y0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    return value


def norm_integral(params: WindLawParams) -> float:
    """Normalizing integral I = int_{w0/w1}^{1} y^a1 (1 - y^{1/beta})^a2 dy.

    Via the substitution y = w/w1 (Jacobian w1), dividing the depth law by
    w1 * I makes the integrated radial depth over [w0, w1] equal the total
    depth of the component exactly.
    """
    return _norm_integral_cached(params.alpha1, params.alpha2, params.beta,
                                 params.w0 / params.w1)


def tau_radial(w, component: str, params: WindLawParams):
    """Sobolev radial optical depth at the point where the wind speed is w.

    Follows the LCP depth law with shaping exponents alpha1/alpha2; zero
    beyond w1, where line formation ceases (rays still traverse that
    region, they just pick up no opacity).
    """
    t_comp = params.t_tot(component)
    w, scalar = _as_array(w)
    if np.any(w < params.w0 - 1e-12):
        raise DomainError(f"speed below wind base (w0={params.w0})")
    y = np.clip(w / params.w1, 0.0, 1.0)
    shape = y**params.alpha1 * np.clip(1.0 - y ** (1.0 / params.beta), 0.0, None) ** params.alpha2
    tau = t_comp / (params.w1 * norm_integral(params)) * shape
    tau = np.where(w > params.w1, 0.0, tau)
    return _scalar_or_array(tau, scalar)


def law_tables(params: WindLawParams, n: int = 256) -> dict:
    """Plot-ready tables: velocity build-up (r, w) and depth drop-off (w, dtau/dw)."""
    w_edge = min(params.w1, 1.0 - 1e-3)
    r_max = radius_at_speed(w_edge, params)
    r = np.concatenate(([1.0], 1.0 + np.geomspace(1e-4, r_max - 1.0, n - 1)))
    w_grid = np.linspace(params.w0, params.w1, n)
    return {
        "r": r,
        "w_of_r": velocity(r, params),
        "w": w_grid,
        "dtau_dw_blue": tau_radial(w_grid, "blue", params),
        "dtau_dw_red": tau_radial(w_grid, "red", params),
    }
