"""HTTP JSON API over the compute core, for the analyzer UI and scripts.

Compute endpoints are pure: identical request bodies produce identical
response bytes.  Single-star profiles are cached per parameter
fingerprint inside the in-memory session, so interactive resweeps of the
same model cost only the per-phase shifting and weighting.
"""

from __future__ import annotations

import hashlib
import json
import threading
from types import SimpleNamespace

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .binary import EclipseState, OrbitalSolution, phase_sequence
from .config import __version__, numeric_fingerprint
from .errors import (ContractError, CoverageError, DomainError, NumericError,
                     ParseError, WindlineError)
from .fitting import goodness
from .sei import FrequencyGrid, RayQuadrature, single_star_profile
from .spectra import Bandpass, dumps_spectrum, extract_light_curve, loads_spectrum
from .wind import DoubletSpec, WindLawParams

__all__ = ["create_app", "Session"]

_GRID_KEYS = {"resolution", "pad"}
_QUAD_KEYS = {"n_core", "n_halo", "z_samples"}


class _ApiError(Exception):
    def __init__(self, status, code, detail, fields=()):
        super().__init__(detail)
        self.status = status
        self.code = code
        self.detail = detail
        self.fields = list(fields)


def _error_response(status, code, detail, fields=()):
    return JSONResponse({"error": {"code": code, "detail": detail,
                                   "fields": list(fields)}},
                        status_code=status)


def _translate(exc: Exception):
    if isinstance(exc, _ApiError):
        return _error_response(exc.status, exc.code, exc.detail, exc.fields)
    if isinstance(exc, ParseError):
        return _error_response(400, "parse_error", str(exc), exc.fields)
    if isinstance(exc, ContractError):
        return _error_response(400, "invalid_request", str(exc), exc.fields)
    if isinstance(exc, (DomainError, CoverageError)):
        return _error_response(422, "invariant_violation", str(exc), exc.fields)
    if isinstance(exc, NumericError):
        return _error_response(500, "numeric_failure", str(exc))
    return None


def _fingerprint(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _require(payload: dict, key: str):
    if not isinstance(payload, dict):
        raise _ApiError(400, "invalid_request", "request body must be a JSON "
                        "object")
    if key not in payload:
        raise _ApiError(400, "invalid_request", f"missing field {key!r}",
                        fields=[key])
    return payload[key]


def _subconfig(payload: dict, key: str, allowed: set) -> dict:
    sub = payload.get(key) or {}
    if not isinstance(sub, dict):
        raise _ApiError(400, "invalid_request", f"{key!r} must be an object",
                        fields=[key])
    unknown = sorted(set(sub) - allowed)
    if unknown:
        raise _ApiError(400, "invalid_request",
                        f"unknown {key} keys: {', '.join(unknown)}",
                        fields=unknown)
    return sub


class Session:
    """In-memory analyst session: spectra, current model, profile cache."""

    def __init__(self, session_id: str = "default"):
        self.id = session_id
        self.lock = threading.Lock()
        self.spectra: dict[str, str] = {}
        self.current_params: dict = {}
        self.current_orbit: dict | None = None
        self.profile_cache: dict[str, object] = {}

    def cached_profile(self, key: str, build):
        with self.lock:
            hit = self.profile_cache.get(key)
        if hit is not None:
            return hit
        profile = build()
        with self.lock:
            self.profile_cache[key] = profile
        return profile

    def export(self) -> dict:
        with self.lock:
            return {
                "id": self.id,
                "spectra": dict(self.spectra),
                "params": dict(self.current_params),
                "orbit": self.current_orbit,
            }

    def restore(self, data: dict):
        spectra = data.get("spectra") or {}
        for text in spectra.values():
            loads_spectrum(text)  # validate before committing anything
        with self.lock:
            self.id = str(data.get("id", "default"))
            self.spectra = dict(spectra)
            self.current_params = dict(data.get("params") or {})
            self.current_orbit = data.get("orbit")
            self.profile_cache.clear()


def _single_profile(session, params_dict, doublet_dict, grid_cfg, quad_cfg):
    params = WindLawParams.from_dict(params_dict)
    doublet = DoubletSpec.from_dict(doublet_dict)
    key = _fingerprint({"params": params.to_dict(), "doublet": doublet.to_dict(),
                        "grid": grid_cfg, "quad": quad_cfg})

    def build():
        grid = FrequencyGrid.for_line(params, doublet,
                                      resolution=grid_cfg.get("resolution"),
                                      pad=grid_cfg.get("pad"))
        quad = RayQuadrature.default(params,
                                     n_core=quad_cfg.get("n_core"),
                                     n_halo=quad_cfg.get("n_halo"),
                                     z_samples=quad_cfg.get("z_samples"))
        return single_star_profile(params, doublet, grid=grid, quad=quad)

    return session.cached_profile(key, build), key


def create_app() -> FastAPI:
    app = FastAPI(title="windline", version=__version__, docs_url=None,
                  redoc_url=None)
    session = Session()
    app.state.session = session

    @app.exception_handler(WindlineError)
    async def _windline_handler(_request, exc):
        return _translate(exc) or _error_response(500, "internal", str(exc))

    @app.exception_handler(_ApiError)
    async def _api_handler(_request, exc):
        return _translate(exc)

    @app.get("/api/health")
    async def health():
        return JSONResponse({"status": "ok", "version": __version__,
                             "fingerprint": numeric_fingerprint()})

    async def _json_body(request: Request) -> dict:
        try:
            return await request.json()
        except Exception:
            raise _ApiError(400, "invalid_request", "body is not valid JSON")

    @app.post("/api/profile/single")
    async def profile_single(request: Request):
        payload = await _json_body(request)
        grid_cfg = _subconfig(payload, "grid", _GRID_KEYS)
        quad_cfg = _subconfig(payload, "quad", _QUAD_KEYS)
        profile, key = _single_profile(session, _require(payload, "params"),
                                       _require(payload, "doublet"),
                                       grid_cfg, quad_cfg)
        with session.lock:
            session.current_params["params"] = profile.params.to_dict()
        return JSONResponse({
            "fingerprint": key,
            "length": int(profile.grid.n),
            "x": profile.grid.x_values.tolist(),
            "wavelength": profile.wavelengths().tolist(),
            "f_core": profile.f_core.tolist(),
            "f_halo": profile.f_halo.tolist(),
            "f_total": profile.f_total.tolist(),
        })

    @app.post("/api/bsei/sequence")
    async def bsei_sequence(request: Request):
        payload = await _json_body(request)
        grid_cfg = _subconfig(payload, "grid", _GRID_KEYS)
        quad_cfg = _subconfig(payload, "quad", _QUAD_KEYS)
        orbit = OrbitalSolution.from_dict(_require(payload, "orbit"))
        raw_phases = _require(payload, "phases")
        if not isinstance(raw_phases, list):
            raise _ApiError(400, "invalid_request", "'phases' must be a list",
                            fields=["phases"])
        phases = []
        for item in raw_phases:
            phi = float(_require(item, "phase"))
            ecl = item.get("eclipse") or {}
            phases.append((phi, EclipseState(kind=ecl.get("kind", "none"),
                                             lc=float(ecl.get("lc", 1.0)))))
        phi_list = [phi for phi, _ in phases]
        if any(b < a for a, b in zip(phi_list, phi_list[1:])):
            raise _ApiError(400, "invalid_request",
                            "phases must be sorted ascending", fields=["phases"])
        params1_dict = _require(payload, "params1")
        params2_dict = _require(payload, "params2")
        doublet_dict = _require(payload, "doublet")
        f1, key1 = _single_profile(session, params1_dict, doublet_dict,
                                   grid_cfg, quad_cfg)
        f2, key2 = _single_profile(session, params2_dict, doublet_dict,
                                   grid_cfg, quad_cfg)
        profiles = phase_sequence(f1.params, f2.params, f1.doublet, orbit,
                                  phases, star_profiles=(f1, f2))
        with session.lock:
            session.current_params = {"params1": f1.params.to_dict(),
                                      "params2": f2.params.to_dict()}
            session.current_orbit = orbit.to_dict()
        body = {
            "fingerprint": _fingerprint({"star1": key1, "star2": key2,
                                         "orbit": orbit.to_dict(),
                                         "phases": [[p, s.kind, s.lc]
                                                    for p, s in phases]}),
            "manifest": {
                "phases": [prof.phase for prof in profiles],
                "weights": [list(prof.weights_used) for prof in profiles],
                "rvs": [list(prof.rv_used) for prof in profiles],
            },
            "profiles": [{
                "phase": prof.phase,
                "length": int(prof.wavelength_grid.size),
                "wavelength": prof.wavelength_grid.tolist(),
                "flux": prof.flux.tolist(),
                "weights": list(prof.weights_used),
                "rv": list(prof.rv_used),
            } for prof in profiles],
        }
        return JSONResponse(body)

    @app.post("/api/spectra")
    async def upload_spectrum(request: Request):
        text = (await request.body()).decode("utf-8")
        spec = loads_spectrum(text, source="upload")
        canonical = dumps_spectrum(spec)
        with session.lock:
            session.spectra[spec.id] = canonical
        return JSONResponse({"id": spec.id, "n": int(spec.n), "hjd": spec.hjd})

    @app.get("/api/spectra/{spectrum_id}")
    async def get_spectrum(spectrum_id: str):
        with session.lock:
            text = session.spectra.get(spectrum_id)
        if text is None:
            return _error_response(404, "not_found",
                                   f"unknown spectrum id {spectrum_id!r}")
        return PlainTextResponse(text, media_type="text/csv")

    @app.post("/api/lightcurve")
    async def lightcurve(request: Request):
        payload = await _json_body(request)
        ids = _require(payload, "spectra_ids")
        band_dict = _require(payload, "band")
        orbit = OrbitalSolution.from_dict(_require(payload, "orbit"))
        band = Bandpass(label=band_dict.get("label", "band"),
                        lambda_min=float(_require(band_dict, "lambda_min")),
                        lambda_max=float(_require(band_dict, "lambda_max")),
                        kind=band_dict.get("kind", "continuum"))
        specs = []
        with session.lock:
            stored = dict(session.spectra)
        for sid in ids:
            if sid not in stored:
                raise _ApiError(404, "not_found", f"unknown spectrum id {sid!r}")
            specs.append(loads_spectrum(stored[sid], source=sid))
        mask = payload.get("out_of_eclipse")
        curve = extract_light_curve(specs, band, orbit, out_of_eclipse=mask)
        return JSONResponse({
            "band": {"label": band.label, "lambda_min": band.lambda_min,
                     "lambda_max": band.lambda_max, "kind": band.kind},
            "points": [{"phase": phi, "lc": lc, "spectrum_id": sid}
                       for phi, lc, sid in curve.points],
        })

    @app.post("/api/fit/goodness")
    async def fit_goodness(request: Request):
        payload = await _json_body(request)
        model_dict = _require(payload, "model")
        lam = np.asarray(_require(model_dict, "wavelength"), dtype=float)
        flux = np.asarray(_require(model_dict, "flux"), dtype=float)
        model = SimpleNamespace(wavelength_grid=lam, flux=flux)
        sid = _require(payload, "observed_id")
        with session.lock:
            text = session.spectra.get(sid)
        if text is None:
            raise _ApiError(404, "not_found", f"unknown spectrum id {sid!r}")
        observed = loads_spectrum(text, source=sid)
        window_dict = _require(payload, "window")
        window = (float(_require(window_dict, "lambda_min")),
                  float(_require(window_dict, "lambda_max")))
        sigma = payload.get("sigma")
        cont = payload.get("continuum_windows")
        cont_bands = None
        if cont is not None:
            cont_bands = [Bandpass(label=c.get("label", "cont"),
                                   lambda_min=float(_require(c, "lambda_min")),
                                   lambda_max=float(_require(c, "lambda_max")))
                          for c in cont]
        rms, chi2 = goodness(model, observed, window, sigma_obs=sigma,
                             continuum_windows=cont_bands)
        return JSONResponse({"rms": rms, "chi2_reduced": chi2})

    @app.get("/api/session")
    async def session_export():
        return JSONResponse(session.export())

    @app.post("/api/session")
    async def session_import(request: Request):
        payload = await _json_body(request)
        session.restore(payload)
        return JSONResponse({"id": session.id,
                             "spectra": sorted(session.spectra)})

    return app
