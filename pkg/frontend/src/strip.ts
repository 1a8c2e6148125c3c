// Per-phase fit-quality strip beside the animation: one bar per phase,
// taller = worse rms, current frame highlighted. With nothing observed
// the strip stays hidden (model-only mode).

import { svgEl } from './chart.js';
import { PhaseGoodness } from './state.js';

export const STRIP = { width: 760, height: 90, padL: 52, padR: 16, padT: 8, padB: 20 };

export function renderStrip(host: SVGSVGElement, goodness: PhaseGoodness[],
                            currentIndex: number): void {
    host.innerHTML = '';
    host.setAttribute('viewBox', `0 0 ${STRIP.width} ${STRIP.height}`);
    if (goodness.length === 0) {
        host.style.display = 'none';
        return;
    }
    host.style.display = '';
    const plotW = STRIP.width - STRIP.padL - STRIP.padR;
    const plotH = STRIP.height - STRIP.padT - STRIP.padB;
    const worst = Math.max(...goodness.map(g => g.rms), 1e-12);
    const barW = plotW / goodness.length;

    goodness.forEach((entry, i) => {
        const h = Math.max(1, entry.rms / worst * plotH);
        host.appendChild(svgEl('rect', {
            x: (STRIP.padL + i * barW + 1).toFixed(1),
            y: (STRIP.padT + plotH - h).toFixed(1),
            width: Math.max(barW - 2, 1).toFixed(1),
            height: h.toFixed(1),
            fill: i === currentIndex ? '#c43516' : '#7a8db0',
        }));
    });
    host.appendChild(svgEl('line', {
        x1: String(STRIP.padL), x2: String(STRIP.padL + plotW),
        y1: String(STRIP.padT + plotH), y2: String(STRIP.padT + plotH),
        stroke: '#889', 'stroke-width': '1',
    }));
    const label = svgEl('text', {
        x: String(STRIP.padL - 6), y: String(STRIP.padT + 10),
        'text-anchor': 'end', 'font-size': '10', fill: '#445',
    });
    label.textContent = 'rms';
    host.appendChild(label);
}
