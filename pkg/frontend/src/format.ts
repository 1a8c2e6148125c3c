// Display formatting: panels show 4 significant figures, phase labels use
// 4 decimals; full-precision values live only in the state.

export function sig4(value: number): string {
    if (!Number.isFinite(value)) return String(value);
    if (value === 0) return '0.000';
    return value.toPrecision(4);
}

export function phaseLabel(phase: number): string {
    return phase.toFixed(4);
}
