"""Batch front door: synthesis, sequences, light curves, fits, service.

Every subcommand is deterministic for identical inputs and seed, and the
exit codes form a stable contract: 0 success, 2 validation, 3 I/O,
4 numeric failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .binary import EclipseState, OrbitalSolution, phase_sequence, write_sequence
from .config import NUMERIC_DEFAULTS, __version__, numeric_fingerprint
from .errors import (ContractError, CoverageError, DomainError, NumericError,
                     ParseError)
from .fitting import FitContext, grid_refine
from .sei import FrequencyGrid, RayQuadrature, single_star_profile
from .spectra import (Bandpass, dump_spectrum, load_spectrum,
                      normalize_spectrum)
from .wind import DoubletSpec, WindLawParams, law_tables

_VALIDATION_ERRORS = (ParseError, ContractError, DomainError, CoverageError)


def _read_json(path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ContractError(f"{path}: invalid JSON ({exc})") from None


def _load_params(path) -> WindLawParams:
    return WindLawParams.from_dict(_read_json(path))


def _load_doublet(path) -> DoubletSpec:
    return DoubletSpec.from_dict(_read_json(path))


def _load_orbit(path) -> OrbitalSolution:
    return OrbitalSolution.from_dict(_read_json(path))


def _load_phases(path):
    data = _read_json(path)
    if not isinstance(data, list):
        raise ContractError(f"{path}: phases file must be a JSON list")
    phases = []
    for item in data:
        phases.append((float(item["phase"]),
                       EclipseState(kind=item.get("kind", "none"),
                                    lc=float(item.get("lc", 1.0)))))
    return phases


def _load_bandpass(data: dict) -> Bandpass:
    return Bandpass(label=data.get("label", "band"),
                    lambda_min=float(data["lambda_min"]),
                    lambda_max=float(data["lambda_max"]),
                    kind=data.get("kind", "continuum"))


def _collect_spectra(paths):
    files = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            files.extend(sorted(p.glob("*.csv")))
        else:
            files.append(p)
    if not files:
        raise ContractError("no spectrum files given")
    return [load_spectrum(f) for f in files]


def _scaled_setup(params, doublet, factor: int):
    if factor < 1:
        raise ContractError("--grid-res must be a positive integer")
    grid = FrequencyGrid.for_line(
        params, doublet, resolution=NUMERIC_DEFAULTS["x_resolution"] / factor)
    quad = RayQuadrature.default(
        params,
        n_core=NUMERIC_DEFAULTS["n_core_rays"] * factor,
        n_halo=NUMERIC_DEFAULTS["n_halo_rays"] * factor,
        z_samples=NUMERIC_DEFAULTS["z_samples_per_ray"] * factor)
    return grid, quad


def _print_version(ctx, _param, value):
    if not value or ctx.resilient_parsing:
        return
    click.echo(f"windline {__version__} (numeric-config {numeric_fingerprint()})")
    ctx.exit()


@click.group(name="windline")
@click.option("--version", is_flag=True, callback=_print_version,
              expose_value=False, is_eager=True,
              help="Print version and numeric-config fingerprint.")
def cli():
    """Wind-line profile synthesis and fitting workbench."""


@cli.command()
@click.option("--params", "params_path", required=True)
@click.option("--doublet", "doublet_path", required=True)
@click.option("--out", "out_path", required=True)
@click.option("--grid-res", default=1, type=int,
              help="Resolution multiplier for rays, z samples, and x step.")
def profile(params_path, doublet_path, out_path, grid_res):
    """Synthesize a single-star profile table plus the law tables."""
    params = _load_params(params_path)
    doublet = _load_doublet(doublet_path)
    grid, quad = _scaled_setup(params, doublet, grid_res)
    prof = single_star_profile(params, doublet, grid=grid, quad=quad)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(prof.to_text())
    laws = law_tables(params)
    laws_path = out.parent / "laws.csv"
    rows = ["r,w_of_r,w,dtau_dw_blue,dtau_dw_red"]
    rows += [",".join(f"{laws[k][i]:.10g}" for k in
                      ("r", "w_of_r", "w", "dtau_dw_blue", "dtau_dw_red"))
             for i in range(laws["r"].size)]
    laws_path.write_text("\n".join(rows) + "\n")
    click.echo(f"wrote {out} and {laws_path}")


@cli.command()
@click.option("--params1", "params1_path", required=True)
@click.option("--params2", "params2_path", required=True)
@click.option("--doublet", "doublet_path", required=True)
@click.option("--orbit", "orbit_path", required=True)
@click.option("--phases", "phases_path", required=True)
@click.option("--out", "out_dir", required=True)
@click.option("--grid-res", default=1, type=int)
def bsei(params1_path, params2_path, doublet_path, orbit_path, phases_path,
         out_dir, grid_res):
    """Synthesize the phase sequence of composite binary profiles."""
    params1 = _load_params(params1_path)
    params2 = _load_params(params2_path)
    doublet = _load_doublet(doublet_path)
    orbit = _load_orbit(orbit_path)
    phases = _load_phases(phases_path)
    grid, quad = _scaled_setup(params1, doublet, grid_res)
    profiles = phase_sequence(params1, params2, doublet, orbit, phases,
                              grid=grid, quad=quad)
    manifest = write_sequence(profiles, out_dir)
    click.echo(f"wrote {len(manifest['files'])} profiles to {out_dir}")


@cli.command()
@click.option("--spectra", "spectra_paths", multiple=True, required=True,
              help="Spectrum CSV files or directories of them.")
@click.option("--band", "band_path", required=True,
              help="JSON bandpass: label, lambda_min, lambda_max, kind.")
@click.option("--orbit", "orbit_path", required=True)
@click.option("--out", "out_path", required=True)
def lightcurve(spectra_paths, band_path, orbit_path, out_path):
    """Extract a phase-folded normalized light curve in one bandpass."""
    from .spectra import extract_light_curve

    specs = _collect_spectra(spectra_paths)
    band = _load_bandpass(_read_json(band_path))
    orbit = _load_orbit(orbit_path)
    curve = extract_light_curve(specs, band, orbit)
    Path(out_path).write_text(curve.to_csv())
    click.echo(f"wrote {len(curve.points)} points to {out_path}")


@cli.command()
@click.option("--in", "in_path", required=True)
@click.option("--windows", "windows_path", required=True,
              help="JSON list of continuum bandpasses.")
@click.option("--out", "out_path", required=True)
def normalize(in_path, windows_path, out_path):
    """Normalize a spectrum to unit continuum via window anchors."""
    spec = load_spectrum(in_path)
    windows = [_load_bandpass(w) for w in _read_json(windows_path)]
    dump_spectrum(normalize_spectrum(spec, windows), out_path)
    click.echo(f"wrote {out_path}")


@cli.command("synth-obs")
@click.option("--params1", "params1_path", required=True)
@click.option("--params2", "params2_path", required=True)
@click.option("--doublet", "doublet_path", required=True)
@click.option("--orbit", "orbit_path", required=True)
@click.option("--phases", "phases_path", required=True)
@click.option("--noise", type=float, default=0.02, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True)
def synth_obs(params1_path, params2_path, doublet_path, orbit_path,
              phases_path, noise, seed, out_dir):
    """Generate noisy synthetic observed spectra for round-trip testing."""
    params1 = _load_params(params1_path)
    params2 = _load_params(params2_path)
    doublet = _load_doublet(doublet_path)
    orbit = _load_orbit(orbit_path)
    phases = _load_phases(phases_path)
    profiles = phase_sequence(params1, params2, doublet, orbit, phases)
    rng = np.random.default_rng(seed)
    outdir = Path(out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    from .spectra import ObservedSpectrum

    for i, prof in enumerate(profiles):
        flux = np.clip(prof.flux + rng.normal(0.0, noise, prof.flux.size),
                       0.0, None)
        hjd = orbit.t0 + prof.phase * orbit.period_days
        spec = ObservedSpectrum(f"synth{i:03d}", hjd, prof.wavelength_grid,
                                flux)
        dump_spectrum(spec, outdir / f"synth{i:03d}.csv")
    truth = {"params1": params1.to_dict(), "params2": params2.to_dict(),
             "doublet": doublet.to_dict(), "orbit": orbit.to_dict(),
             "noise": noise, "seed": seed,
             "phases": [phi for phi, _ in phases]}
    (outdir / "truth.json").write_text(json.dumps(truth, indent=2) + "\n")
    click.echo(f"wrote {len(profiles)} synthetic spectra to {out_dir}")


@cli.command()
@click.option("--observed", "observed_paths", multiple=True, required=True)
@click.option("--params1", "params1_path", required=True)
@click.option("--params2", "params2_path", required=True)
@click.option("--doublet", "doublet_path", required=True)
@click.option("--orbit", "orbit_path", required=True)
@click.option("--bounds", "bounds_specs", multiple=True, required=True,
              help="Free parameter box, e.g. t_tot_blue=1:6 (repeatable).")
@click.option("--window", "window_spec", required=True,
              help="Fit window lo:hi in Angstrom.")
@click.option("--sigma", type=float, default=None,
              help="Observed noise; estimated from continuum if omitted.")
@click.option("--continuum", "continuum_specs", multiple=True,
              help="Continuum window lo:hi for the noise estimate.")
@click.option("--rounds", type=int, default=3, show_default=True)
@click.option("--out", "out_path", required=True)
def fit(observed_paths, params1_path, params2_path, doublet_path, orbit_path,
        bounds_specs, window_spec, sigma, continuum_specs, rounds, out_path):
    """Grid-refine free wind parameters of star 1 against observed spectra."""
    observed = _collect_spectra(observed_paths)
    bounds = {}
    for spec_str in bounds_specs:
        try:
            name, box = spec_str.split("=", 1)
            lo, hi = (float(v) for v in box.split(":", 1))
        except ValueError:
            raise ContractError(f"bad --bounds value {spec_str!r}; expected "
                                "name=lo:hi") from None
        bounds[name] = (lo, hi)
    try:
        win_lo, win_hi = (float(v) for v in window_spec.split(":", 1))
    except ValueError:
        raise ContractError(f"bad --window value {window_spec!r}") from None
    continuum = None
    if continuum_specs:
        continuum = []
        for i, spec_str in enumerate(continuum_specs):
            lo, hi = (float(v) for v in spec_str.split(":", 1))
            continuum.append(Bandpass(label=f"cont{i}", lambda_min=lo,
                                      lambda_max=hi))
    context = FitContext(params1=_load_params(params1_path),
                         params2=_load_params(params2_path),
                         doublet=_load_doublet(doublet_path),
                         orbit=_load_orbit(orbit_path),
                         observed=observed, window=(win_lo, win_hi),
                         sigma_obs=sigma, continuum_windows=continuum)
    best, report = grid_refine(bounds, context, rounds=rounds)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps({"best": best, "report": report.to_dict()},
                              indent=2) + "\n")
    out.with_suffix(".csv").write_text(report.to_csv())
    click.echo(json.dumps({"best": best, "aggregate_rms": report.aggregate}))


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8777, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP JSON API."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except click.Abort:
        click.echo("aborted", err=True)
        sys.exit(2)
    except _VALIDATION_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except NumericError as exc:
        click.echo(f"numeric failure: {exc}", err=True)
        sys.exit(4)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(3)
    sys.exit(0)


if __name__ == "__main__":
    main()
