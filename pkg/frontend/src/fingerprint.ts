// Canonical request keys: the same body always serializes to the same
// string, so a response can be matched to the edit that requested it.

function sortValue(value: unknown): unknown {
    if (Array.isArray(value)) return value.map(sortValue);
    if (value && typeof value === 'object') {
        const out: Record<string, unknown> = {};
        for (const key of Object.keys(value as object).sort()) {
            out[key] = sortValue((value as Record<string, unknown>)[key]);
        }
        return out;
    }
    return value;
}

export function canonicalKey(body: unknown): string {
    return JSON.stringify(sortValue(body));
}
