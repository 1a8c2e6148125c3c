// SVG overlay chart: the model profile as a line, observed samples as
// markers, mirroring the usual presentation of wind-line fits.

const SVG_NS = 'http://www.w3.org/2000/svg';

export const CHART = { width: 760, height: 340, padL: 52, padR: 16, padT: 14, padB: 34 };

export function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
    const el = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, value);
    return el;
}

interface Series {
    x: number[];
    y: number[];
}

function extent(values: number[], lo: number, hi: number): [number, number] {
    for (const v of values) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    return [lo, hi];
}

export function renderOverlay(host: SVGSVGElement, model: Series | null,
                              observed: Series | null): void {
    host.innerHTML = '';
    host.setAttribute('viewBox', `0 0 ${CHART.width} ${CHART.height}`);
    const plotW = CHART.width - CHART.padL - CHART.padR;
    const plotH = CHART.height - CHART.padT - CHART.padB;
    if (!model && !observed) return;

    let [xLo, xHi] = [Infinity, -Infinity];
    let [yLo, yHi] = [0.0, 1.05];
    if (model) {
        [xLo, xHi] = extent(model.x, xLo, xHi);
        [yLo, yHi] = extent(model.y, yLo, yHi);
    }
    if (observed) {
        [xLo, xHi] = extent(observed.x, xLo, xHi);
        [yLo, yHi] = extent(observed.y, yLo, yHi);
    }
    const sx = (x: number) => CHART.padL + (x - xLo) / (xHi - xLo) * plotW;
    const sy = (y: number) => CHART.padT + (yHi - y) / (yHi - yLo) * plotH;

    // frame + continuum reference
    host.appendChild(svgEl('rect', {
        x: String(CHART.padL), y: String(CHART.padT), width: String(plotW),
        height: String(plotH), fill: 'none', stroke: '#889', 'stroke-width': '1',
    }));
    host.appendChild(svgEl('line', {
        x1: String(CHART.padL), x2: String(CHART.padL + plotW),
        y1: sy(1).toFixed(1), y2: sy(1).toFixed(1),
        stroke: '#aab', 'stroke-dasharray': '4 4', 'stroke-width': '0.8',
    }));

    // axis labels: wavelength ticks along the bottom, flux up the side
    const nTicks = 6;
    for (let i = 0; i <= nTicks; i++) {
        const lam = xLo + (xHi - xLo) * i / nTicks;
        const tx = sx(lam);
        host.appendChild(svgEl('line', {
            x1: tx.toFixed(1), x2: tx.toFixed(1),
            y1: String(CHART.padT + plotH), y2: String(CHART.padT + plotH + 5),
            stroke: '#889', 'stroke-width': '1',
        }));
        const label = svgEl('text', {
            x: tx.toFixed(1), y: String(CHART.padT + plotH + 18),
            'text-anchor': 'middle', 'font-size': '11', fill: '#445',
        });
        label.textContent = lam.toFixed(1);
        host.appendChild(label);
    }
    for (const flux of [yLo, (yLo + yHi) / 2, yHi]) {
        const label = svgEl('text', {
            x: String(CHART.padL - 6), y: (sy(flux) + 4).toFixed(1),
            'text-anchor': 'end', 'font-size': '11', fill: '#445',
        });
        label.textContent = flux.toFixed(2);
        host.appendChild(label);
    }

    if (observed) {
        for (let i = 0; i < observed.x.length; i++) {
            host.appendChild(svgEl('circle', {
                cx: sx(observed.x[i]).toFixed(1),
                cy: sy(observed.y[i]).toFixed(1),
                r: '1.6', fill: '#b5651d', 'fill-opacity': '0.75',
            }));
        }
    }
    if (model) {
        const path = model.x.map((x, i) =>
            `${i === 0 ? 'M' : 'L'}${sx(x).toFixed(1)},${sy(model.y[i]).toFixed(1)}`
        ).join('');
        host.appendChild(svgEl('path', {
            d: path, fill: 'none', stroke: '#1660c4', 'stroke-width': '1.6',
        }));
    }
}
