// Phase playback: ordered frames, wrap at phase 1, seek snapping, and the
// real-time full-cycle pace.

import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { phaseLabel } from '../src/format.js';
import { PhasePlayer } from '../src/playback.js';

const PHASES = Array.from({ length: 20 }, (_, i) => i / 20);

describe('PhasePlayer with fake timers', () => {
    beforeEach(() => vi.useFakeTimers());
    afterEach(() => vi.useRealTimers());

    it('steps through all frames in order and wraps without a jump', () => {
        const frames: number[] = [];
        const player = new PhasePlayer(() => 20, 10, i => frames.push(i));
        player.play();
        vi.advanceTimersByTime(2000);  // exactly one full cycle at 10 fps
        expect(frames).toHaveLength(20);
        expect(frames.slice(0, 3)).toEqual([1, 2, 3]);
        expect(frames[frames.length - 1]).toBe(0);  // wrapped to phase 0
        player.pause();
        expect(player.playing).toBe(false);
    });

    it('keeps cycling after the wrap', () => {
        const frames: number[] = [];
        const player = new PhasePlayer(() => 20, 10, i => frames.push(i));
        player.play();
        vi.advanceTimersByTime(4100);
        expect(frames.length).toBeGreaterThanOrEqual(40);
        expect(frames[19]).toBe(0);
        expect(frames[20]).toBe(1);
        player.pause();
    });

    it('pause freezes the frame', () => {
        const frames: number[] = [];
        const player = new PhasePlayer(() => 20, 10, i => frames.push(i));
        player.play();
        vi.advanceTimersByTime(500);
        player.pause();
        const count = frames.length;
        vi.advanceTimersByTime(1000);
        expect(frames.length).toBe(count);
    });
});

describe('seek', () => {
    it('snaps to the nearest loaded phase and labels it with 4 decimals', () => {
        let current = -1;
        const player = new PhasePlayer(() => 20, 10, i => { current = i; });
        player.seek(0.25, PHASES);
        expect(current).toBe(5);
        expect(phaseLabel(PHASES[current])).toBe('0.2500');
    });

    it('is cyclic near phase 1', () => {
        let current = -1;
        const player = new PhasePlayer(() => 20, 10, i => { current = i; });
        player.seek(0.999, PHASES);
        expect(current).toBe(0);
    });
});

describe('real-time pace', () => {
    it('runs a 20-frame cycle at 10 fps in 2.0 +/- 0.2 s', async () => {
        const start = Date.now();
        let elapsed = 0;
        await new Promise<void>(resolve => {
            let count = 0;
            const player = new PhasePlayer(() => 20, 10, () => {
                count += 1;
                if (count === 20) {
                    elapsed = Date.now() - start;
                    player.pause();
                    resolve();
                }
            });
            player.play();
        });
        expect(elapsed).toBeGreaterThanOrEqual(1800);
        expect(elapsed).toBeLessThanOrEqual(2200);
    }, 5000);
});
