// Analyzer entry point: parameter panels, observed-vs-model overlay,
// phase-ordered playback, and the per-phase fit-quality strip, all driven
// through the compute service.

import { ApiClient, ApiError, SequenceRequest, WindParams } from './api.js';
import { renderOverlay } from './chart.js';
import { phaseLabel, sig4 } from './format.js';
import { PARAM_FIELDS, validateOrbit, validateParams } from './params.js';
import { PhasePlayer } from './playback.js';
import { RecomputeLoop } from './recompute.js';
import {
    AnalyzerState, createInitialState, nearestObserved, phaseGrid,
} from './state.js';
import { renderStrip } from './strip.js';

// Interactive fidelity keeps the edit round-trip well under budget; the
// checkbox switches to the service's full default quadrature.
const INTERACTIVE = {
    quad: { n_core: 24, n_halo: 32, z_samples: 128 },
    grid: { resolution: 0.02 },
};

const api = new ApiClient('');
const state: AnalyzerState = createInitialState();

const $ = (id: string) => document.getElementById(id) as HTMLElement;

// ---- Model requests ----

function buildRequest(): SequenceRequest {
    const body: SequenceRequest = {
        params1: { ...state.params1 },
        params2: { ...state.params2 },
        doublet: { ...state.doublet },
        orbit: { ...state.orbit },
        phases: phaseGrid(state.nPhases),
    };
    const full = ($('full-fidelity') as HTMLInputElement).checked;
    if (!full) {
        body.quad = INTERACTIVE.quad;
        body.grid = INTERACTIVE.grid;
    }
    return body;
}

const recompute = new RecomputeLoop(
    body => api.sequence(body),
    resp => {
        state.profiles = resp.profiles;
        state.modelFingerprint = resp.fingerprint;
        if (state.phaseIndex >= state.profiles.length) state.phaseIndex = 0;
        renderStatus();
        renderFrame();
        void refreshGoodness(resp.fingerprint);
    },
    err => {
        renderStatus();
        showErrors(err);
    },
);

// ---- Playback ----

const player = new PhasePlayer(() => state.profiles.length, state.fps,
                               index => {
                                   state.phaseIndex = index;
                                   renderFrame();
                               });

// ---- Rendering ----

function renderFrame(): void {
    const overlay = $('overlay') as unknown as SVGSVGElement;
    const profile = state.profiles[state.phaseIndex];
    if (!profile) {
        renderOverlay(overlay, null, null);
        return;
    }
    const obs = nearestObserved(state, profile.phase);
    renderOverlay(overlay,
                  { x: profile.wavelength, y: profile.flux },
                  obs ? { x: obs.wavelength, y: obs.flux } : null);
    renderStrip($('strip') as unknown as SVGSVGElement, state.goodness,
                state.phaseIndex);
    $('phase-label').textContent = phaseLabel(profile.phase);
    $('frame-info').textContent =
        `W = (${sig4(profile.weights[0])}, ${sig4(profile.weights[1])})  ` +
        `RV = (${sig4(profile.rv[0])}, ${sig4(profile.rv[1])}) km/s` +
        (obs ? `  obs ${obs.id} @ ${phaseLabel(obs.phase)}` : '');
    const slider = $('phase-seek') as HTMLInputElement;
    slider.max = String(Math.max(state.profiles.length - 1, 0));
    slider.value = String(state.phaseIndex);
}

function renderStatus(): void {
    $('pending').style.visibility = recompute.pending ? 'visible' : 'hidden';
    $('fingerprint').textContent =
        state.modelFingerprint ? `model ${state.modelFingerprint}` : '';
}

function showErrors(err: unknown): void {
    const box = $('errors');
    if (err instanceof ApiError) {
        box.textContent = err.fields.length
            ? `${err.detail} [${err.fields.join(', ')}]` : err.detail;
        for (const field of err.fields) markField(field, err.detail);
    } else if (err) {
        box.textContent = String(err);
    } else {
        box.textContent = '';
    }
}

function markField(field: string, message: string): void {
    for (const star of [1, 2]) {
        const input = document.getElementById(`p${star}-${field}`);
        if (input) {
            input.classList.add('invalid');
            (input as HTMLInputElement).title = message;
        }
    }
}

function clearFieldMarks(): void {
    document.querySelectorAll('input.invalid').forEach(el => {
        el.classList.remove('invalid');
        (el as HTMLInputElement).title = '';
    });
}

// ---- Fit readout ----

async function refreshGoodness(fingerprint: string): Promise<void> {
    if (state.observed.length === 0) {
        state.goodness = [];
        renderFrame();
        return;
    }
    const entries = [];
    for (const profile of state.profiles) {
        const obs = nearestObserved(state, profile.phase);
        if (!obs) continue;
        const windowSpec = {
            lambda_min: Math.max(profile.wavelength[0], obs.wavelength[0]),
            lambda_max: Math.min(profile.wavelength[profile.length - 1],
                                 obs.wavelength[obs.wavelength.length - 1]),
        };
        try {
            const result = await api.goodness(
                { wavelength: profile.wavelength, flux: profile.flux },
                obs.id, windowSpec, state.sigma);
            entries.push({ phase: profile.phase, rms: result.rms });
        } catch (err) {
            showErrors(err);
            return;
        }
    }
    if (state.modelFingerprint !== fingerprint) return;  // superseded
    state.goodness = entries;
    renderFrame();
}

// ---- Parameter panels ----

function onParamEdit(star: 1 | 2, field: keyof WindParams,
                     raw: string): void {
    clearFieldMarks();
    const params = star === 1 ? state.params1 : state.params2;
    const candidate = { ...params, [field]: Number(raw) };
    const issues = validateParams(candidate);
    if (issues.length > 0) {
        $('errors').textContent = issues.map(i => i.message)
            .filter((m, i, a) => a.indexOf(m) === i).join('; ');
        for (const issue of issues) markField(issue.field, issue.message);
        return;  // invalid edit stays visible in the input, nothing is sent
    }
    $('errors').textContent = '';
    if (star === 1) state.params1 = candidate;
    else state.params2 = candidate;
    recompute.schedule(buildRequest());
    renderStatus();
}

function buildParamPanel(star: 1 | 2): void {
    const host = $(`star${star}-panel`);
    const params = star === 1 ? state.params1 : state.params2;
    for (const [field, spec] of Object.entries(PARAM_FIELDS)) {
        if (field === 'epsilon') continue;  // pinned, not editable
        const row = document.createElement('label');
        row.className = 'param-row';
        const caption = document.createElement('span');
        caption.textContent = spec.label;
        const input = document.createElement('input');
        input.type = 'number';
        input.id = `p${star}-${field}`;
        input.min = String(spec.min);
        input.max = String(spec.max);
        input.step = String(spec.step);
        input.value = sig4(params[field as keyof WindParams]);
        input.addEventListener('input', () =>
            onParamEdit(star, field as keyof WindParams, input.value));
        row.appendChild(caption);
        row.appendChild(input);
        host.appendChild(row);
    }
}

function buildOrbitPanel(): void {
    const host = $('orbit-panel');
    for (const field of Object.keys(state.orbit) as (keyof typeof state.orbit)[]) {
        const row = document.createElement('label');
        row.className = 'param-row';
        const caption = document.createElement('span');
        caption.textContent = field;
        const input = document.createElement('input');
        input.type = 'number';
        input.id = `orbit-${field}`;
        input.value = sig4(state.orbit[field]);
        input.addEventListener('input', () => {
            const candidate = { ...state.orbit, [field]: Number(input.value) };
            const issues = validateOrbit(candidate);
            clearFieldMarks();
            if (issues.length > 0) {
                $('errors').textContent =
                    issues.map(i => i.message).join('; ');
                return;
            }
            $('errors').textContent = '';
            state.orbit = candidate;
            recompute.schedule(buildRequest());
            renderStatus();
        });
        row.appendChild(caption);
        row.appendChild(input);
        host.appendChild(row);
    }
}

// ---- Observed spectra ----

function parseSpectrumCsv(text: string): { wavelength: number[]; flux: number[] } {
    const wavelength: number[] = [];
    const flux: number[] = [];
    for (const line of text.split('\n')) {
        if (!line || line.startsWith('#') || line.startsWith('wavelength')) continue;
        const [lam, fl] = line.split(',');
        wavelength.push(Number(lam));
        flux.push(Number(fl));
    }
    return { wavelength, flux };
}

async function loadObserved(files: FileList): Promise<void> {
    try {
        const ids: string[] = [];
        for (const file of Array.from(files)) {
            const uploaded = await api.uploadSpectrum(await file.text());
            ids.push(uploaded.id);
        }
        const bandLo = state.doublet.lambda_blue - 30;
        const curve = await api.lightcurve(
            ids, { label: 'ui-cont', lambda_min: bandLo, lambda_max: bandLo + 5 },
            state.orbit);
        const byId = new Map(curve.points.map(pt => [pt.spectrum_id, pt]));
        const loaded = [];
        for (const id of ids) {
            const point = byId.get(id);
            if (!point) continue;
            const parsed = parseSpectrumCsv(await api.getSpectrum(id));
            loaded.push({ id, phase: point.phase, lc: point.lc, ...parsed });
        }
        state.observed = loaded.sort((a, b) => a.phase - b.phase);
        $('obs-info').textContent = `${state.observed.length} observed windows`;
        void refreshGoodness(state.modelFingerprint);
    } catch (err) {
        showErrors(err);
    }
}

// ---- Session ----

async function exportSession(): Promise<void> {
    const blob = new Blob([JSON.stringify(await api.exportSession(), null, 2)],
                          { type: 'application/json' });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = 'windline-session.json';
    link.click();
    URL.revokeObjectURL(link.href);
}

async function importSession(file: File): Promise<void> {
    try {
        await api.importSession(JSON.parse(await file.text()));
        $('obs-info').textContent = 'session imported';
    } catch (err) {
        showErrors(err);
    }
}

// ---- Wiring ----

function wire(): void {
    buildParamPanel(1);
    buildParamPanel(2);
    buildOrbitPanel();

    $('play').addEventListener('click', () => player.play());
    $('pause').addEventListener('click', () => player.pause());
    ($('phase-seek') as HTMLInputElement).addEventListener('input', ev => {
        player.pause();
        const index = Number((ev.target as HTMLInputElement).value);
        state.phaseIndex = Math.min(index, state.profiles.length - 1);
        renderFrame();
    });
    ($('fps') as HTMLInputElement).addEventListener('change', ev => {
        state.fps = Number((ev.target as HTMLInputElement).value) || 10;
        player.setFps(state.fps);
    });
    ($('n-phases') as HTMLInputElement).addEventListener('change', ev => {
        state.nPhases = Math.max(2, Number((ev.target as HTMLInputElement).value) || 20);
        recompute.schedule(buildRequest());
        renderStatus();
    });
    $('full-fidelity').addEventListener('change', () => {
        recompute.schedule(buildRequest());
        renderStatus();
    });
    ($('obs-files') as HTMLInputElement).addEventListener('change', ev => {
        const files = (ev.target as HTMLInputElement).files;
        if (files && files.length) void loadObserved(files);
    });
    $('session-export').addEventListener('click', () => void exportSession());
    ($('session-import') as HTMLInputElement).addEventListener('change', ev => {
        const files = (ev.target as HTMLInputElement).files;
        if (files && files.length) void importSession(files[0]);
    });

    api.health().then(info => {
        $('server-info').textContent =
            `service ${info.version} (${info.fingerprint})`;
    }).catch(() => {
        $('server-info').textContent = 'service unreachable';
    });

    recompute.fireNow(buildRequest());
    renderStatus();
}

if (typeof document !== 'undefined' && document.getElementById('overlay')) {
    wire();
}
