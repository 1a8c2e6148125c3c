// Phase-ordered playback: steps through the loaded sequence at the
// configured frame rate, wrapping at phase 1 without a frame jump.

export class PhasePlayer {
    playing = false;
    index = 0;

    private timer: ReturnType<typeof setInterval> | null = null;

    constructor(
        private frameCount: () => number,
        public fps: number,
        private onFrame: (index: number) => void,
    ) {}

    play(): void {
        if (this.playing || this.frameCount() === 0) return;
        this.playing = true;
        this.timer = setInterval(() => this.step(), 1000 / this.fps);
    }

    pause(): void {
        this.playing = false;
        if (this.timer !== null) {
            clearInterval(this.timer);
            this.timer = null;
        }
    }

    setFps(fps: number): void {
        this.fps = fps;
        if (this.playing) {
            this.pause();
            this.play();
        }
    }

    /** Jump to the frame whose phase is nearest the requested one. */
    seek(phase: number, phases: number[]): void {
        if (phases.length === 0) return;
        const target = ((phase % 1) + 1) % 1;
        let best = 0;
        let bestDist = Infinity;
        phases.forEach((p, i) => {
            // cyclic distance, so seeking 0.99 can land on phase 0
            const d = Math.min(Math.abs(p - target), 1 - Math.abs(p - target));
            if (d < bestDist) {
                bestDist = d;
                best = i;
            }
        });
        this.index = best;
        this.onFrame(this.index);
    }

    private step(): void {
        const n = this.frameCount();
        if (n === 0) return;
        this.index = (this.index + 1) % n;
        this.onFrame(this.index);
    }
}
