// Typed client for the wind-line compute service. The UI holds no numerics
// of its own: every profile value on screen came out of these endpoints.

export interface WindParams {
    w0: number;
    beta: number;
    w_gauss: number;
    w1: number;
    alpha1: number;
    alpha2: number;
    t_tot_blue: number;
    t_tot_red: number;
    a_phot_blue: number;
    a_phot_red: number;
    w_phot_blue: number;
    w_phot_red: number;
    v_inf: number;
    epsilon: number;
}

export interface DoubletSpec {
    lambda_blue: number;
    lambda_red: number;
    ion_label: string;
}

export interface Orbit {
    period_days: number;
    t0: number;
    eccentricity: number;
    omega_deg: number;
    k1_kms: number;
    k2_kms: number;
    gamma_kms: number;
    l1: number;
    l2: number;
}

export interface EclipseSpec {
    kind: 'none' | 'primary_eclipsed' | 'secondary_eclipsed';
    lc: number;
}

export interface PhaseSpec {
    phase: number;
    eclipse?: EclipseSpec;
}

export interface SequenceRequest {
    params1: WindParams;
    params2: WindParams;
    doublet: DoubletSpec;
    orbit: Orbit;
    phases: PhaseSpec[];
    grid?: { resolution?: number; pad?: number };
    quad?: { n_core?: number; n_halo?: number; z_samples?: number };
}

export interface SequenceProfile {
    phase: number;
    length: number;
    wavelength: number[];
    flux: number[];
    weights: number[];
    rv: number[];
}

export interface SequenceResponse {
    fingerprint: string;
    manifest: { phases: number[]; weights: number[][]; rvs: number[][] };
    profiles: SequenceProfile[];
}

export interface ApiErrorBody {
    error: { code: string; detail: string; fields: string[] };
}

export interface LightCurvePoint {
    phase: number;
    lc: number;
    spectrum_id: string;
}

/** Error carrying the service's field-anchored diagnostics. */
export class ApiError extends Error {
    constructor(public status: number, public code: string,
                public detail: string, public fields: string[]) {
        super(detail);
    }
}

async function parseError(resp: Response): Promise<never> {
    let body: ApiErrorBody | null = null;
    try {
        body = await resp.json();
    } catch {
        // non-JSON error body; fall through to the generic error
    }
    if (body && body.error) {
        throw new ApiError(resp.status, body.error.code, body.error.detail,
                           body.error.fields || []);
    }
    throw new ApiError(resp.status, 'http_error', `HTTP ${resp.status}`, []);
}

export class ApiClient {
    constructor(private base: string = '') {}

    private async postJson<T>(path: string, body: unknown): Promise<T> {
        const resp = await fetch(this.base + path, {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify(body),
        });
        if (!resp.ok) await parseError(resp);
        return resp.json() as Promise<T>;
    }

    health(): Promise<{ status: string; version: string; fingerprint: string }> {
        return fetch(this.base + '/api/health').then(r => r.json());
    }

    sequence(body: SequenceRequest): Promise<SequenceResponse> {
        return this.postJson('/api/bsei/sequence', body);
    }

    async uploadSpectrum(csv: string): Promise<{ id: string; n: number; hjd: number }> {
        const resp = await fetch(this.base + '/api/spectra', {
            method: 'POST',
            headers: { 'Content-Type': 'text/csv' },
            body: csv,
        });
        if (!resp.ok) await parseError(resp);
        return resp.json();
    }

    lightcurve(spectraIds: string[], band: { label: string; lambda_min: number; lambda_max: number },
               orbit: Orbit): Promise<{ points: LightCurvePoint[] }> {
        return this.postJson('/api/lightcurve',
                             { spectra_ids: spectraIds, band, orbit });
    }

    goodness(model: { wavelength: number[]; flux: number[] }, observedId: string,
             window: { lambda_min: number; lambda_max: number },
             sigma: number): Promise<{ rms: number; chi2_reduced: number }> {
        return this.postJson('/api/fit/goodness', {
            model, observed_id: observedId, window, sigma,
        });
    }

    async getSpectrum(id: string): Promise<string> {
        const resp = await fetch(this.base + `/api/spectra/${id}`);
        if (!resp.ok) await parseError(resp);
        return resp.text();
    }

    exportSession(): Promise<unknown> {
        return fetch(this.base + '/api/session').then(r => r.json());
    }

    importSession(session: unknown): Promise<unknown> {
        return this.postJson('/api/session', session);
    }
}
