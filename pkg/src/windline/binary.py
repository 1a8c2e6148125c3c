"""Composite binary wind-line profiles from two single-star models.

The two stars' steady winds give phase-independent single-star profiles;
everything phase-dependent enters through Keplerian Doppler shifts and a
weighting scheme that splits each profile into its photospheric-disk part
(weighted by the eclipse-aware continuum weights) and its extended-halo
part (weighted by the constant intrinsic light ratio, since no eclipse
weighting can be devised for light that does not come from the disks).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields as _dc_fields
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ContractError, DomainError, NumericError
from .sei import SingleStarProfile, single_star_profile
from .wind import C_KMS, DoubletSpec, WindLawParams

__all__ = [
    "OrbitalSolution",
    "EclipseState",
    "EclipseWeights",
    "BseiProfile",
    "solve_kepler",
    "radial_velocity",
    "doppler_shift",
    "eclipse_weights",
    "amalgamate",
    "phase_sequence",
    "write_sequence",
    "load_bsei",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OrbitalSolution:
    """Keplerian elements, RV semi-amplitudes, and the UV light ratio."""

    period_days: float
    t0: float
    eccentricity: float
    omega_deg: float
    k1_kms: float
    k2_kms: float
    gamma_kms: float
    l1: float
    l2: float

    def __post_init__(self):
        if not self.period_days > 0:
            raise DomainError("period_days must be positive", fields=["period_days"])
        if not 0.0 <= self.eccentricity < 1.0:
            raise DomainError("eccentricity must lie in [0, 1)",
                              fields=["eccentricity"])
        if self.k1_kms < 0 or self.k2_kms < 0:
            raise DomainError("semi-amplitudes must be non-negative",
                              fields=["k1_kms", "k2_kms"])
        if not (self.l1 > 0 and self.l2 > 0):
            raise DomainError("light ratio components must be positive",
                              fields=["l1", "l2"])
        if abs(self.l1 + self.l2 - 1.0) > 1e-9:
            raise DomainError(f"l1 + l2 must equal 1 (got {self.l1 + self.l2})",
                              fields=["l1", "l2"])

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "OrbitalSolution":
        names = [f.name for f in _dc_fields(cls)]
        unknown = sorted(set(data) - set(names))
        if unknown:
            raise ContractError(f"unknown OrbitalSolution keys: {', '.join(unknown)}",
                                fields=unknown)
        missing = sorted(set(names) - set(data))
        if missing:
            raise ContractError(f"missing OrbitalSolution keys: {', '.join(missing)}",
                                fields=missing)
        return cls(**{k: float(v) for k, v in data.items()})

    @classmethod
    def from_json(cls, text: str) -> "OrbitalSolution":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class EclipseState:
    """Which star (if any) is eclipsed and the continuum light level LC."""

    kind: str = "none"
    lc: float = 1.0

    def __post_init__(self):
        if self.kind not in ("none", "primary_eclipsed", "secondary_eclipsed"):
            raise ContractError(f"unknown eclipse kind {self.kind!r}",
                                fields=["kind"])
        if not 0.0 < self.lc <= 1.0 + 1e-6:
            raise DomainError(f"LC must lie in (0, 1] (got {self.lc})",
                              fields=["lc"])


class EclipseWeights(NamedTuple):
    w1: float
    w2: float
    clipped: bool


@dataclass(frozen=True, eq=False)
class BseiProfile:
    """Phase-stamped composite model profile on a wavelength grid."""

    phase: float
    wavelength_grid: np.ndarray
    flux: np.ndarray
    weights_used: tuple
    rv_used: tuple

    def __post_init__(self):
        lam = np.asarray(self.wavelength_grid, dtype=float)
        flux = np.asarray(self.flux, dtype=float)
        if np.any(np.diff(lam) <= 0):
            raise ContractError("wavelength grid must be strictly increasing")
        if flux.shape != lam.shape:
            raise ContractError("flux does not match the wavelength grid")
        if not np.all(np.isfinite(flux)):
            raise NumericError("non-finite composite flux")
        object.__setattr__(self, "wavelength_grid", lam)
        object.__setattr__(self, "flux", flux)
        object.__setattr__(self, "phase", float(self.phase) % 1.0)


def solve_kepler(mean_anomaly, eccentricity: float):
    """Eccentric anomaly E with E - e sin E = M, by safeguarded Newton.

    The iterate is clipped to the bracket [M - e, M + e], which always
    contains the root, so convergence is unconditional for e < 1.
    """
    e = float(eccentricity)
    if not 0.0 <= e < 1.0:
        raise DomainError("eccentricity must lie in [0, 1)")
    m_in = np.asarray(mean_anomaly, dtype=float)
    scalar = m_in.ndim == 0
    cycles = np.floor(m_in / _TWO_PI)
    m = m_in - _TWO_PI * cycles
    E = m + e * np.sin(m)
    for _ in range(60):
        f = E - e * np.sin(E) - m
        if np.all(np.abs(f) < 1e-14):
            break
        E = np.clip(E - f / (1.0 - e * np.cos(E)), m - e, m + e)
    residual = np.abs(E - e * np.sin(E) - m)
    if np.any(residual > 1e-12):
        raise NumericError(f"Kepler solver failed to converge "
                           f"(max residual {residual.max():.3e})")
    out = E + _TWO_PI * cycles
    return float(out) if scalar else out


def _true_anomaly(E, e):
    return 2.0 * np.arctan2(np.sqrt(1.0 + e) * np.sin(E / 2.0),
                            np.sqrt(1.0 - e) * np.cos(E / 2.0))


def radial_velocity(phase, star: int, orbit: OrbitalSolution):
    """RV_j(phi) = gamma +/- K_j [cos(nu + omega) + e cos omega], km/s.

    Phase zero is primary conjunction; the two stars' arguments of
    periastron differ by pi, so for a circular orbit this reduces to
    gamma + K1 sin(2 pi phi) and gamma - K2 sin(2 pi phi).
    """
    if star not in (1, 2):
        raise ContractError("star must be 1 or 2")
    e = orbit.eccentricity
    omega = math.radians(orbit.omega_deg)
    nu_conj = -math.pi / 2.0 - omega
    e_conj = 2.0 * math.atan2(math.sqrt(1.0 - e) * math.sin(nu_conj / 2.0),
                              math.sqrt(1.0 + e) * math.cos(nu_conj / 2.0))
    m_conj = e_conj - e * math.sin(e_conj)
    phase_arr = np.asarray(phase, dtype=float)
    scalar = phase_arr.ndim == 0
    big_e = solve_kepler(_TWO_PI * phase_arr + m_conj, e)
    nu = _true_anomaly(np.asarray(big_e), e)
    base = np.cos(nu + omega) + e * math.cos(omega)
    k = orbit.k1_kms if star == 1 else orbit.k2_kms
    sign = 1.0 if star == 1 else -1.0
    out = orbit.gamma_kms + sign * k * base
    return float(out) if scalar else out


def doppler_shift(wavelengths, flux, rv_kms: float, fill: float = 1.0):
    """Shift a profile by rv (wavelength axis scaled by 1 + rv/c) and
    resample linearly back onto the input grid; ends fill with continuum."""
    lam = np.asarray(wavelengths, dtype=float)
    if np.any(np.diff(lam) <= 0):
        raise ContractError("wavelength grid must be strictly increasing")
    lam_rest = lam / (1.0 + rv_kms / C_KMS)
    return np.interp(lam_rest, lam, np.asarray(flux, dtype=float),
                     left=fill, right=fill)


def eclipse_weights(state: EclipseState, orbit: OrbitalSolution,
                    printed_rule: bool = False) -> EclipseWeights:
    """Disk weights (W1, W2) for the current eclipse state.

    Out of eclipse both weights equal the intrinsic light ratio.  During an
    eclipse the eclipsed star's weight absorbs the continuum deficit
    (W = LC minus the companion's light), so the composite continuum equals
    LC exactly; `printed_rule` instead subtracts the star's own light.
    Negative weights are clipped to zero and flagged.
    """
    l1, l2 = orbit.l1, orbit.l2
    if state.kind == "none":
        return EclipseWeights(l1, l2, False)
    if state.kind == "primary_eclipsed":
        w1, w2 = state.lc - (l1 if printed_rule else l2), l2
    else:
        w1, w2 = l1, state.lc - (l2 if printed_rule else l1)
    clipped = w1 < 0.0 or w2 < 0.0
    return EclipseWeights(max(w1, 0.0), max(w2, 0.0), clipped)


def _resampled(profile: SingleStarProfile, lam: np.ndarray):
    lam_own = profile.wavelengths()
    core = np.interp(lam, lam_own, profile.f_core, left=1.0, right=1.0)
    halo = np.interp(lam, lam_own, profile.f_halo, left=0.0, right=0.0)
    return core, halo


def _common_grid(f1: SingleStarProfile, f2: SingleStarProfile) -> np.ndarray:
    lam1, lam2 = f1.wavelengths(), f2.wavelengths()
    if lam1.size == lam2.size and np.array_equal(lam1, lam2):
        return lam1
    lo, hi = min(lam1[0], lam2[0]), max(lam1[-1], lam2[-1])
    if max(lam1[0], lam2[0]) >= min(lam1[-1], lam2[-1]):
        raise ContractError("star profiles do not share wavelength coverage")
    step = min(np.min(np.diff(lam1)), np.min(np.diff(lam2)))
    n = int(math.ceil((hi - lo) / step)) + 1
    return lo + step * np.arange(n)


def amalgamate(f1: SingleStarProfile, f2: SingleStarProfile, phase: float,
               orbit: OrbitalSolution, state: EclipseState,
               wavelength_grid=None, printed_rule: bool = False) -> BseiProfile:
    """Combine two single-star profiles into the composite at one phase.

    F(lambda; phi) = shift(W1 f1_core + L1 f1_halo, RV1)
                   + shift(W2 f2_core + L2 f2_halo, RV2),
    with the halo weights held at the intrinsic light ratio for the whole
    Keplerian cycle.
    """
    phase = float(phase) % 1.0
    if wavelength_grid is None:
        lam = _common_grid(f1, f2)
    else:
        lam = np.asarray(wavelength_grid, dtype=float)
        if np.any(np.diff(lam) <= 0):
            raise ContractError("wavelength grid must be strictly increasing")
    rv1 = radial_velocity(phase, 1, orbit)
    rv2 = radial_velocity(phase, 2, orbit)
    wts = eclipse_weights(state, orbit, printed_rule)
    flux = np.zeros_like(lam)
    for prof, rv, w_disk, w_halo in ((f1, rv1, wts.w1, orbit.l1),
                                     (f2, rv2, wts.w2, orbit.l2)):
        core, halo = _resampled(prof, lam)
        flux = flux + doppler_shift(lam, w_disk * core + w_halo * halo, rv,
                                    fill=w_disk)
    return BseiProfile(phase, lam, flux, (wts.w1, wts.w2), (rv1, rv2))


def phase_sequence(params1: WindLawParams, params2: WindLawParams,
                   doublet: DoubletSpec, orbit: OrbitalSolution,
                   phases, grid=None, quad=None, printed_rule: bool = False,
                   star_profiles=None) -> list:
    """One BseiProfile per (phase, EclipseState) pair, phases ascending.

    The two single-star profiles are computed once (winds are steady);
    only the shifts and weights vary along the sequence.  Precomputed
    profiles can be injected through `star_profiles`.
    """
    phases = list(phases)
    phi_values = [float(p) for p, _ in phases]
    if any(b < a for a, b in zip(phi_values, phi_values[1:])):
        raise ContractError("phases must be sorted in ascending order")
    if star_profiles is not None:
        f1, f2 = star_profiles
    else:
        f1 = single_star_profile(params1, doublet, grid=grid, quad=quad)
        f2 = f1 if params2 == params1 else single_star_profile(
            params2, doublet, grid=grid, quad=quad)
    lam = _common_grid(f1, f2)
    return [amalgamate(f1, f2, phi, orbit, state, wavelength_grid=lam,
                       printed_rule=printed_rule)
            for phi, state in phases]


def write_sequence(profiles, outdir) -> dict:
    """Write one `bsei_phi{phase:.4f}.dat` per profile plus a manifest JSON."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {"phases": [], "weights": [], "rvs": [], "files": []}
    for prof in profiles:
        name = f"bsei_phi{prof.phase:.4f}.dat"
        meta = {"phase": prof.phase,
                "weights": [prof.weights_used[0], prof.weights_used[1]],
                "rv": [prof.rv_used[0], prof.rv_used[1]]}
        lines = ["# " + json.dumps(meta)]
        lines += [f"{float(lam)!r} {float(fl)!r}"
                  for lam, fl in zip(prof.wavelength_grid, prof.flux)]
        (outdir / name).write_text("\n".join(lines) + "\n")
        manifest["phases"].append(prof.phase)
        manifest["weights"].append(meta["weights"])
        manifest["rvs"].append(meta["rv"])
        manifest["files"].append(name)
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def load_bsei(path):
    """Read back one per-phase profile file: (meta, wavelengths, flux)."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# "):
        raise ContractError(f"{path}: missing JSON header line")
    meta = json.loads(lines[0][2:])
    data = np.array([[float(v) for v in ln.split()] for ln in lines[1:]])
    return meta, data[:, 0], data[:, 1]
