"""Model-vs-observation agreement metrics and coarse parameter refinement.

The human fitting loop stays primary: `goodness` scores a single model
against one observed window, and `grid_refine` automates the same loop
with a deterministic coordinate-descent grid search when wanted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .binary import EclipseState, OrbitalSolution, phase_sequence
from .errors import ContractError, CoverageError
from .sei import single_star_profile
from .spectra import Bandpass, ObservedSpectrum, phase_fold
from .wind import DoubletSpec, WindLawParams

__all__ = [
    "FitContext",
    "PhaseGoodness",
    "FitReport",
    "goodness",
    "sequence_report",
    "grid_refine",
    "phase_quality_profile",
    "estimate_sigma",
]


def _window_bounds(window) -> tuple[float, float]:
    if isinstance(window, Bandpass):
        return window.lambda_min, window.lambda_max
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ContractError("window must satisfy lo < hi")
    return lo, hi


def estimate_sigma(observed: ObservedSpectrum, continuum_windows) -> float:
    """Noise estimate: scatter of (flux - 1) over the continuum windows."""
    residuals = []
    for band in continuum_windows:
        mask = ((observed.wavelengths >= band.lambda_min)
                & (observed.wavelengths <= band.lambda_max))
        residuals.append(observed.fluxes[mask] - 1.0)
    residuals = np.concatenate(residuals) if residuals else np.array([])
    if residuals.size < 2:
        raise ContractError("continuum windows contain too few samples for a "
                            "noise estimate")
    return float(np.std(residuals))


def goodness(model, observed: ObservedSpectrum, window, sigma_obs=None,
             continuum_windows=None) -> tuple[float, float]:
    """(rms, reduced chi-square) of model vs observation inside the window.

    The model is resampled onto the observed wavelengths.  If sigma_obs is
    not supplied it is estimated from the continuum scatter.
    """
    lo, hi = _window_bounds(window)
    mask = (observed.wavelengths >= lo) & (observed.wavelengths <= hi)
    if not np.any(mask):
        raise CoverageError("fit window contains no observed samples")
    model_flux = np.interp(observed.wavelengths[mask], model.wavelength_grid,
                           model.flux)
    resid = model_flux - observed.fluxes[mask]
    rms = float(np.sqrt(np.mean(resid**2)))
    if sigma_obs is None:
        if continuum_windows is None:
            raise ContractError("supply sigma_obs or continuum windows to "
                                "estimate it")
        sigma_obs = estimate_sigma(observed, continuum_windows)
    if sigma_obs <= 0:
        raise ContractError("sigma_obs must be positive")
    chi2_reduced = float(np.mean((resid / sigma_obs) ** 2))
    return rms, chi2_reduced


@dataclass(frozen=True)
class PhaseGoodness:
    phase: float
    rms: float
    chi2: float


@dataclass(frozen=True, eq=False)
class FitReport:
    """Per-phase scores over the truncated window plus their mean."""

    entries: list

    @property
    def aggregate(self) -> float:
        return float(np.mean([e.rms for e in self.entries]))

    def to_dict(self) -> dict:
        return {
            "aggregate_rms": self.aggregate,
            "phases": [{"phase": e.phase, "rms": e.rms, "chi2": e.chi2}
                       for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        lines = ["phase,rms,chi2"]
        lines += [f"{e.phase:.7g},{e.rms:.7g},{e.chi2:.7g}"
                  for e in self.entries]
        return "\n".join(lines) + "\n"


def phase_quality_profile(report: FitReport) -> list:
    """Phases ordered best fit first (stable sort on rms)."""
    if len(report.entries) < 2:
        raise ContractError("need at least two phases to rank")
    ranked = sorted(report.entries, key=lambda e: e.rms)
    return [(e.phase, e.rms) for e in ranked]


@dataclass(eq=False)
class FitContext:
    """Everything held fixed while candidate wind parameters are scored."""

    params1: WindLawParams
    params2: WindLawParams
    doublet: DoubletSpec
    orbit: OrbitalSolution
    observed: list
    window: object
    sigma_obs: float | None = None
    continuum_windows: list | None = None
    eclipse_states: dict | None = None
    grid: object = None
    quad: object = None
    _companion_profile: object = field(default=None, repr=False)

    def phases_and_spectra(self):
        pairs = sorted(((phase_fold(s.hjd, self.orbit), s)
                        for s in self.observed), key=lambda t: t[0])
        states = self.eclipse_states or {}
        return [(phi, states.get(spec.id, EclipseState()), spec)
                for phi, spec in pairs]

    def companion_profile(self):
        if self._companion_profile is None:
            self._companion_profile = single_star_profile(
                self.params2, self.doublet, grid=self.grid, quad=self.quad)
        return self._companion_profile


def sequence_report(params1: WindLawParams, context: FitContext) -> FitReport:
    """Score one primary-wind candidate against every observed phase."""
    triplets = context.phases_and_spectra()
    f1 = single_star_profile(params1, context.doublet, grid=context.grid,
                             quad=context.quad)
    f2 = context.companion_profile()
    profiles = phase_sequence(params1, context.params2, context.doublet,
                              context.orbit,
                              [(phi, state) for phi, state, _ in triplets],
                              star_profiles=(f1, f2))
    entries = []
    for (phi, _, spec), model in zip(triplets, profiles):
        rms, chi2 = goodness(model, spec, context.window,
                             sigma_obs=context.sigma_obs,
                             continuum_windows=context.continuum_windows)
        entries.append(PhaseGoodness(phi, rms, chi2))
    return FitReport(entries)


def grid_refine(free_params: dict, context: FitContext, rounds: int = 3,
                points_per_axis: int = 9):
    """Coordinate-descent grid search over up to four wind parameters.

    Each pass sweeps every axis with `points_per_axis` uniform values over
    its current box; after a pass the boxes shrink threefold around the
    incumbent (clipped to the original bounds).  Ties break toward lower
    parameter values, and the incumbent never gets worse than the best
    evaluated point.

    Returns (best parameter values, FitReport of the best candidate).
    """
    if not free_params:
        raise ContractError("no free parameters given")
    if len(free_params) > 4:
        raise ContractError("grid_refine supports at most four free parameters")
    if not context.observed:
        raise ContractError("empty observation set")
    names = list(free_params)
    original = {n: (float(lo), float(hi)) for n, (lo, hi) in free_params.items()}
    for n, (lo, hi) in original.items():
        if not lo < hi:
            raise ContractError(f"bounds for {n} must satisfy lo < hi")
    boxes = dict(original)
    incumbent = {n: (lo + hi) / 2.0 for n, (lo, hi) in boxes.items()}

    def score_of(values: dict):
        candidate = replace(context.params1, **values)
        report = sequence_report(candidate, context)
        return report.aggregate, report

    best_score, best_report = score_of(incumbent)
    best_key = (best_score, tuple(incumbent[n] for n in names))

    for pass_index in range(rounds + 1):
        if pass_index > 0:
            for n in names:
                lo0, hi0 = original[n]
                half = (boxes[n][1] - boxes[n][0]) / 6.0
                center = incumbent[n]
                boxes[n] = (max(lo0, center - half), min(hi0, center + half))
        for axis in names:
            lo, hi = boxes[axis]
            evaluated = []
            for value in np.linspace(lo, hi, points_per_axis):
                candidate_values = dict(incumbent)
                candidate_values[axis] = float(value)
                score, report = score_of(candidate_values)
                evaluated.append(((score, tuple(candidate_values[n] for n in names)),
                                  candidate_values, report))
            key, values, report = min(evaluated, key=lambda t: t[0])
            if key < best_key:
                best_key, best_report = key, report
                incumbent = values
                best_score = key[0]
    return dict(incumbent), best_report
