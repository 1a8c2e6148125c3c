// Debounced model recomputation with stale-response discard.
//
// Edits funnel through schedule(); after the debounce window one request
// is issued (never more than one in flight). Every accepted model is
// labeled with the server-echoed fingerprint of the exact parameters that
// produced it; a response whose request no longer matches the latest
// desired body is dropped on arrival, so the overlay can never show a
// model from superseded parameters.

import { SequenceRequest, SequenceResponse } from './api.js';
import { canonicalKey } from './fingerprint.js';

export const DEBOUNCE_MS = 250;

export interface RecomputeStats {
    requests: number;
    accepted: number;
    staleDiscarded: number;
    errors: number;
}

export class RecomputeLoop {
    readonly stats: RecomputeStats = {
        requests: 0, accepted: 0, staleDiscarded: 0, errors: 0,
    };
    pending = false;

    private desiredBody: SequenceRequest | null = null;
    private desiredKey = '';
    private inFlight = false;
    private timer: ReturnType<typeof setTimeout> | null = null;

    constructor(
        private send: (body: SequenceRequest) => Promise<SequenceResponse>,
        private onAccept: (resp: SequenceResponse, body: SequenceRequest) => void,
        private onError: (err: unknown) => void = () => {},
        private debounceMs: number = DEBOUNCE_MS,
    ) {}

    /** Register the newest desired model; issues after the debounce window. */
    schedule(body: SequenceRequest): void {
        this.desiredBody = body;
        this.desiredKey = canonicalKey(body);
        this.pending = true;
        if (this.timer !== null) clearTimeout(this.timer);
        this.timer = setTimeout(() => {
            this.timer = null;
            this.maybeIssue();
        }, this.debounceMs);
    }

    /** Recompute immediately, skipping the debounce (initial load). */
    fireNow(body: SequenceRequest): void {
        this.desiredBody = body;
        this.desiredKey = canonicalKey(body);
        this.pending = true;
        this.maybeIssue();
    }

    private maybeIssue(): void {
        if (this.inFlight || this.desiredBody === null) return;
        const body = this.desiredBody;
        const key = this.desiredKey;
        this.inFlight = true;
        this.stats.requests += 1;
        this.send(body).then(resp => {
            this.inFlight = false;
            if (key !== this.desiredKey) {
                // A newer edit superseded this request while it was in
                // flight: its fingerprint no longer matches the desired
                // parameters, so the response must not reach the overlay.
                this.stats.staleDiscarded += 1;
                this.maybeIssue();
                return;
            }
            this.stats.accepted += 1;
            this.pending = false;
            this.onAccept(resp, body);
        }, err => {
            this.inFlight = false;
            this.stats.errors += 1;
            if (key === this.desiredKey) {
                this.pending = false;
                this.onError(err);
            } else {
                this.maybeIssue();
            }
        });
    }
}
