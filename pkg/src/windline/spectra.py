"""Observed-spectrum handling: loading, normalization, light curves, windows.

The interchange format is a minimal CSV: a comment header carrying the
spectrum id and heliocentric Julian date, a column-name row, then
wavelength/flux rows.  All floating-point output uses 7 significant
digits, and reading a file written here reproduces it byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .binary import OrbitalSolution
from .errors import ContractError, CoverageError, ParseError

__all__ = [
    "ObservedSpectrum",
    "Bandpass",
    "LightCurve",
    "load_spectrum",
    "loads_spectrum",
    "dump_spectrum",
    "dumps_spectrum",
    "phase_fold",
    "extract_light_curve",
    "normalize_spectrum",
    "truncate_window",
]

_COLUMN_ROW = "wavelength_A,flux"


def _fmt(value: float) -> str:
    return f"{value:.7g}"


@dataclass(frozen=True, eq=False)
class ObservedSpectrum:
    """One observed spectrum with timing metadata."""

    id: str
    hjd: float
    wavelengths: np.ndarray
    fluxes: np.ndarray
    phase: float | None = None

    def __post_init__(self):
        lam = np.asarray(self.wavelengths, dtype=float)
        flux = np.asarray(self.fluxes, dtype=float)
        if lam.size != flux.size:
            raise ContractError("wavelengths and fluxes differ in length")
        if np.any(np.diff(lam) <= 0):
            raise ContractError("wavelengths must be strictly increasing")
        if not np.all(np.isfinite(flux)) or np.any(flux < 0):
            raise ContractError("fluxes must be finite and non-negative")
        object.__setattr__(self, "wavelengths", lam)
        object.__setattr__(self, "fluxes", flux)

    @property
    def n(self) -> int:
        return self.wavelengths.size


@dataclass(frozen=True)
class Bandpass:
    """Wavelength interval tagged as continuum or wind-affected."""

    label: str
    lambda_min: float
    lambda_max: float
    kind: str = "continuum"

    def __post_init__(self):
        if not self.lambda_min < self.lambda_max:
            raise ContractError("lambda_min must be below lambda_max",
                                fields=["lambda_min", "lambda_max"])
        if self.kind not in ("continuum", "wind"):
            raise ContractError(f"unknown bandpass kind {self.kind!r}",
                                fields=["kind"])


@dataclass(frozen=True, eq=False)
class LightCurve:
    """Phase-ordered normalized band fluxes: (phase, LC, spectrum id)."""

    points: list
    bandpass: Bandpass

    def to_csv(self) -> str:
        lines = ["phase,lc,spectrum_id"]
        lines += [f"{_fmt(phi)},{_fmt(lc)},{sid}" for phi, lc, sid in self.points]
        return "\n".join(lines) + "\n"


def loads_spectrum(text: str, source: str = "<string>") -> ObservedSpectrum:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ParseError(f"{source}: missing '# id=... hjd=...' header",
                         line_number=1)
    header = lines[0].lstrip("#").split()
    fields = dict(item.split("=", 1) for item in header if "=" in item)
    if "id" not in fields or "hjd" not in fields:
        raise ParseError(f"{source}: header must carry id= and hjd=",
                         line_number=1)
    try:
        hjd = float(fields["hjd"])
    except ValueError:
        raise ParseError(f"{source}: bad hjd value {fields['hjd']!r}",
                         line_number=1) from None
    start = 1
    if len(lines) > 1 and lines[1].strip() == _COLUMN_ROW:
        start = 2
    lam, flux = [], []
    for i, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"{source}: expected 'wavelength,flux'",
                             line_number=i)
        try:
            lam_i, flux_i = float(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(f"{source}: non-numeric row {line!r}",
                             line_number=i) from None
        if lam and lam_i <= lam[-1]:
            raise ParseError(
                f"{source}: wavelengths not strictly increasing at "
                f"{_fmt(lam_i)}", line_number=i)
        if not math.isfinite(flux_i) or flux_i < 0:
            raise ParseError(f"{source}: flux must be finite and >= 0",
                             line_number=i)
        lam.append(lam_i)
        flux.append(flux_i)
    if not lam:
        raise ParseError(f"{source}: no data rows", line_number=len(lines))
    return ObservedSpectrum(fields["id"], hjd, np.array(lam), np.array(flux))


def load_spectrum(path) -> ObservedSpectrum:
    path = Path(path)
    return loads_spectrum(path.read_text(), source=path.name)


def dumps_spectrum(spec: ObservedSpectrum) -> str:
    lines = [f"# id={spec.id} hjd={_fmt(spec.hjd)}", _COLUMN_ROW]
    lines += [f"{_fmt(lam)},{_fmt(fl)}"
              for lam, fl in zip(spec.wavelengths, spec.fluxes)]
    return "\n".join(lines) + "\n"


def dump_spectrum(spec: ObservedSpectrum, path) -> None:
    Path(path).write_text(dumps_spectrum(spec))


def phase_fold(hjd, orbit: OrbitalSolution):
    """Orbital phase in [0, 1) for a heliocentric Julian date."""
    hjd = np.asarray(hjd, dtype=float)
    scalar = hjd.ndim == 0
    phi = np.mod((hjd - orbit.t0) / orbit.period_days, 1.0)
    phi = np.where(phi >= 1.0, phi - 1.0, phi)  # guard the mod(1.0) edge
    return float(phi) if scalar else phi


def _band_mean(spec: ObservedSpectrum, band: Bandpass) -> float:
    if band.lambda_min < spec.wavelengths[0] or band.lambda_max > spec.wavelengths[-1]:
        raise CoverageError(
            f"spectrum {spec.id} does not cover band {band.label!r} "
            f"[{band.lambda_min}, {band.lambda_max}]")
    mask = (spec.wavelengths >= band.lambda_min) & (spec.wavelengths <= band.lambda_max)
    if not np.any(mask):
        raise CoverageError(f"band {band.label!r} contains no samples of "
                            f"spectrum {spec.id}")
    return float(np.mean(spec.fluxes[mask]))


def extract_light_curve(spectra, band: Bandpass, orbit: OrbitalSolution,
                        out_of_eclipse=None) -> LightCurve:
    """Phase-folded normalized band fluxes, one point per spectrum.

    The normalization anchor is the mean raw flux over the out-of-eclipse
    subset; by default that subset is the brightest quartile, which is
    robust as long as at least a quarter of the phases are uneclipsed.
    """
    spectra = list(spectra)
    if not spectra:
        raise ContractError("no spectra supplied")
    raw = np.array([_band_mean(s, band) for s in spectra])
    if out_of_eclipse is not None:
        mask = np.asarray(out_of_eclipse, dtype=bool)
        if mask.shape != raw.shape or not np.any(mask):
            raise ContractError("out_of_eclipse mask must select at least one "
                                "spectrum")
    else:
        n_top = max(1, math.ceil(raw.size / 4))
        mask = np.zeros(raw.size, dtype=bool)
        mask[np.argsort(raw, kind="stable")[-n_top:]] = True
    anchor = float(np.mean(raw[mask]))
    phases = [phase_fold(s.hjd, orbit) for s in spectra]
    points = sorted(
        ((phi, lc, s.id) for phi, lc, s in zip(phases, raw / anchor, spectra)),
        key=lambda t: t[0])
    return LightCurve(points, band)


def normalize_spectrum(spec: ObservedSpectrum, continuum_windows) -> ObservedSpectrum:
    """Divide by a straight line fitted through the window-mean anchors.

    Requires at least two continuum windows bracketing the line region;
    with exactly two the fit interpolates the anchors, so flat or linear
    continua normalize to unity exactly.
    """
    windows = list(continuum_windows)
    if len(windows) < 2:
        raise ContractError("need at least two continuum windows")
    anchors_lam, anchors_flux = [], []
    for band in windows:
        if band.lambda_min < spec.wavelengths[0] or band.lambda_max > spec.wavelengths[-1]:
            raise CoverageError(f"continuum window {band.label!r} outside "
                                f"coverage of spectrum {spec.id}")
        mask = ((spec.wavelengths >= band.lambda_min)
                & (spec.wavelengths <= band.lambda_max))
        if not np.any(mask):
            raise CoverageError(f"continuum window {band.label!r} contains no "
                                "samples")
        anchors_lam.append(float(np.mean(spec.wavelengths[mask])))
        anchors_flux.append(float(np.mean(spec.fluxes[mask])))
    slope, intercept = np.polyfit(anchors_lam, anchors_flux, 1)
    continuum = slope * spec.wavelengths + intercept
    if np.any(continuum <= 0):
        raise ContractError("fitted continuum is not positive over the spectrum")
    return replace(spec, fluxes=spec.fluxes / continuum)


def truncate_window(spec: ObservedSpectrum, center_lambda: float,
                    half_width: float) -> ObservedSpectrum:
    """Subset of samples with |lambda - center| <= half_width."""
    if half_width <= 0:
        raise ContractError("half_width must be positive")
    mask = np.abs(spec.wavelengths - center_lambda) <= half_width
    if not np.any(mask):
        raise CoverageError(
            f"window {center_lambda} +/- {half_width} contains no samples of "
            f"spectrum {spec.id}")
    return replace(spec, wavelengths=spec.wavelengths[mask],
                   fluxes=spec.fluxes[mask])
