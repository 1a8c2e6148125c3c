// Analyzer session state. Full-precision values live here; the DOM only
// ever sees formatted copies.

import {
    DoubletSpec, Orbit, SequenceProfile, WindParams,
} from './api.js';
import { DEFAULT_DOUBLET, DEFAULT_ORBIT, DEFAULT_PARAMS } from './params.js';

export interface ObservedWindow {
    id: string;
    phase: number;
    lc: number;
    wavelength: number[];
    flux: number[];
}

export interface PhaseGoodness {
    phase: number;
    rms: number;
}

export interface AnalyzerState {
    sessionId: string;
    params1: WindParams;
    params2: WindParams;
    doublet: DoubletSpec;
    orbit: Orbit;
    nPhases: number;
    profiles: SequenceProfile[];
    modelFingerprint: string;   // echoed by the server for the shown model
    observed: ObservedWindow[];
    goodness: PhaseGoodness[];
    phaseIndex: number;
    fps: number;
    sigma: number;              // noise level used by the fit readout
}

export function createInitialState(): AnalyzerState {
    return {
        sessionId: 'default',
        params1: { ...DEFAULT_PARAMS },
        params2: { ...DEFAULT_PARAMS, t_tot_blue: 1.0, t_tot_red: 0.5 },
        doublet: { ...DEFAULT_DOUBLET },
        orbit: { ...DEFAULT_ORBIT },
        nPhases: 20,
        profiles: [],
        modelFingerprint: '',
        observed: [],
        goodness: [],
        phaseIndex: 0,
        fps: 10,
        sigma: 0.02,
    };
}

/** Uniform phase grid for the model sequence. */
export function phaseGrid(n: number): { phase: number }[] {
    return Array.from({ length: n }, (_, i) => ({ phase: i / n }));
}

/** Observed window nearest in (cyclic) phase to the given one. */
export function nearestObserved(state: AnalyzerState,
                                phase: number): ObservedWindow | null {
    let best: ObservedWindow | null = null;
    let bestDist = Infinity;
    for (const obs of state.observed) {
        const d = Math.min(Math.abs(obs.phase - phase),
                           1 - Math.abs(obs.phase - phase));
        if (d < bestDist) {
            bestDist = d;
            best = obs;
        }
    }
    return best;
}
