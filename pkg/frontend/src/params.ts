// Parameter metadata and client-side range validation mirroring the
// service's wind-parameter invariants, so obviously bad edits never leave
// the browser.

import { Orbit, WindParams } from './api.js';

export interface FieldSpec {
    min: number;
    max: number;
    step: number;
    label: string;
}

export const PARAM_FIELDS: Record<keyof WindParams, FieldSpec> = {
    w0:          { min: 1e-4, max: 0.5,  step: 0.001, label: 'base speed w0' },
    beta:        { min: 0.05, max: 5.0,  step: 0.05,  label: 'velocity exponent beta' },
    w_gauss:     { min: 0.0,  max: 0.5,  step: 0.005, label: 'turbulence w_gauss' },
    w1:          { min: 0.01, max: 1.0,  step: 0.01,  label: 'wind extent w1' },
    alpha1:      { min: 0.0,  max: 4.0,  step: 0.05,  label: 'depth exponent alpha1' },
    alpha2:      { min: 0.0,  max: 4.0,  step: 0.05,  label: 'depth exponent alpha2' },
    t_tot_blue:  { min: 0.0,  max: 50.0, step: 0.05,  label: 'blue depth T_tot' },
    t_tot_red:   { min: 0.0,  max: 50.0, step: 0.05,  label: 'red depth T_tot' },
    a_phot_blue: { min: 0.0,  max: 1.0,  step: 0.01,  label: 'blue phot. depth' },
    a_phot_red:  { min: 0.0,  max: 1.0,  step: 0.01,  label: 'red phot. depth' },
    w_phot_blue: { min: 1e-3, max: 1.0,  step: 0.005, label: 'blue phot. width' },
    w_phot_red:  { min: 1e-3, max: 1.0,  step: 0.005, label: 'red phot. width' },
    v_inf:       { min: 100,  max: 5000, step: 10,    label: 'terminal speed [km/s]' },
    epsilon:     { min: 0.0,  max: 0.0,  step: 0.0,   label: 'collisional ratio (fixed 0)' },
};

export interface FieldIssue {
    field: string;
    message: string;
}

/** Range and cross-field checks for one star's wind parameters. */
export function validateParams(p: WindParams): FieldIssue[] {
    const issues: FieldIssue[] = [];
    for (const [name, spec] of Object.entries(PARAM_FIELDS)) {
        const value = p[name as keyof WindParams];
        if (!Number.isFinite(value)) {
            issues.push({ field: name, message: `${spec.label}: not a number` });
        } else if (value < spec.min || value > spec.max) {
            issues.push({
                field: name,
                message: `${spec.label}: ${value} outside [${spec.min}, ${spec.max}]`,
            });
        }
    }
    if (!(p.w0 > 0 && p.w0 < p.w1 && p.w1 <= 1.0)) {
        const message = `need 0 < w0 < w1 <= 1 (w0=${p.w0}, w1=${p.w1})`;
        issues.push({ field: 'w0', message });
        issues.push({ field: 'w1', message });
    }
    if (p.epsilon !== 0) {
        issues.push({ field: 'epsilon', message: 'epsilon is fixed at 0' });
    }
    return issues;
}

export function validateOrbit(orbit: Orbit): FieldIssue[] {
    const issues: FieldIssue[] = [];
    if (!(orbit.period_days > 0)) {
        issues.push({ field: 'period_days', message: 'period must be positive' });
    }
    if (!(orbit.eccentricity >= 0 && orbit.eccentricity < 1)) {
        issues.push({ field: 'eccentricity', message: 'eccentricity must lie in [0, 1)' });
    }
    if (orbit.k1_kms < 0 || orbit.k2_kms < 0) {
        issues.push({ field: 'k1_kms', message: 'semi-amplitudes must be non-negative' });
    }
    if (Math.abs(orbit.l1 + orbit.l2 - 1.0) > 1e-9) {
        const message = `l1 + l2 must equal 1 (got ${orbit.l1 + orbit.l2})`;
        issues.push({ field: 'l1', message });
        issues.push({ field: 'l2', message });
    }
    return issues;
}

export const DEFAULT_PARAMS: WindParams = {
    w0: 0.01, beta: 1.0, w_gauss: 0.1, w1: 0.98, alpha1: 0.0, alpha2: 1.0,
    t_tot_blue: 3.0, t_tot_red: 1.5, a_phot_blue: 0.25, a_phot_red: 0.2,
    w_phot_blue: 0.12, w_phot_red: 0.12, v_inf: 2100, epsilon: 0.0,
};

export const DEFAULT_ORBIT: Orbit = {
    period_days: 3.367, t0: 2448000.0, eccentricity: 0.0, omega_deg: 0.0,
    k1_kms: 250.0, k2_kms: 260.0, gamma_kms: 10.0, l1: 0.6, l2: 0.4,
};

export const DEFAULT_DOUBLET = {
    lambda_blue: 1548.195, lambda_red: 1550.772, ion_label: 'CIV',
};
