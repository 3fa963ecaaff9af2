/** Minimal SVG assembly for static line charts and node maps. */

export interface Frame {
    width: number;
    height: number;
    left: number;
    right: number;
    top: number;
    bottom: number;
}

export const DEFAULT_FRAME: Frame = {
    width: 640, height: 420, left: 64, right: 20, top: 36, bottom: 48,
};

export interface Span { lo: number; hi: number }

export function spanOf(values: number[], padFrac = 0.08): Span {
    const finite = values.filter(Number.isFinite);
    let lo = Math.min(...finite);
    let hi = Math.max(...finite);
    if (lo === hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const pad = (hi - lo) * padFrac;
    return { lo: lo - pad, hi: hi + pad };
}

export function includeValue(s: Span, v: number, padFrac = 0.08): Span {
    const pad = (s.hi - s.lo) * padFrac;
    return { lo: Math.min(s.lo, v - pad), hi: Math.max(s.hi, v + pad) };
}

/** Affine map from a data span onto [outLo, outHi] (outHi < outLo flips y). */
export function scaleOf(s: Span, outLo: number, outHi: number): (v: number) => number {
    const k = (outHi - outLo) / (s.hi - s.lo);
    return v => outLo + (v - s.lo) * k;
}

const fmt = (v: number): string => {
    const a = Math.abs(v);
    const s = a !== 0 && (a >= 1e4 || a < 1e-3) ? v.toExponential(2) : v.toPrecision(4);
    return String(Number(s)); // strip trailing zeros
};

export function esc(s: string): string {
    return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export function polyline(pts: Array<[number, number]>, stroke: string, dash = ''): string {
    const d = pts.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(' ');
    const extra = dash ? ` stroke-dasharray="${dash}"` : '';
    return `<polyline points="${d}" fill="none" stroke="${stroke}" stroke-width="1.5"${extra}/>`;
}

export function circle(x: number, y: number, r: number, fill: string, cls = ''): string {
    const c = cls ? ` class="${cls}"` : '';
    return `<circle${c} cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${fill}"/>`;
}

export function rect(
    x: number, y: number, w: number, h: number, fill: string, cls = '',
): string {
    const c = cls ? ` class="${cls}"` : '';
    return `<rect${c} x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${w.toFixed(2)}" ` +
        `height="${h.toFixed(2)}" fill="${fill}"/>`;
}

export function text(
    x: number, y: number, body: string, anchor = 'start', size = 12, fill = '#222',
): string {
    return `<text x="${x.toFixed(2)}" y="${y.toFixed(2)}" text-anchor="${anchor}" ` +
        `font-family="sans-serif" font-size="${size}" fill="${fill}">${esc(body)}</text>`;
}

/** Axes, tick marks, tick labels and a boundary box for a line chart. */
export function axes(
    f: Frame, xs: Span, ys: Span, xLabel: string, yLabel: string, nTicks = 5,
): string[] {
    const sx = scaleOf(xs, f.left, f.width - f.right);
    const sy = scaleOf(ys, f.height - f.bottom, f.top);
    const out: string[] = [];
    out.push(
        `<rect x="${f.left}" y="${f.top}" width="${f.width - f.left - f.right}" ` +
        `height="${f.height - f.top - f.bottom}" fill="none" stroke="#444"/>`,
    );
    for (let i = 0; i < nTicks; i++) {
        const t = i / (nTicks - 1);
        const xv = xs.lo + t * (xs.hi - xs.lo);
        const yv = ys.lo + t * (ys.hi - ys.lo);
        const px = sx(xv);
        const py = sy(yv);
        out.push(`<line x1="${px.toFixed(2)}" y1="${f.height - f.bottom}" ` +
            `x2="${px.toFixed(2)}" y2="${f.height - f.bottom + 5}" stroke="#444"/>`);
        out.push(text(px, f.height - f.bottom + 18, fmt(xv), 'middle', 11));
        out.push(`<line x1="${f.left - 5}" y1="${py.toFixed(2)}" ` +
            `x2="${f.left}" y2="${py.toFixed(2)}" stroke="#444"/>`);
        out.push(text(f.left - 8, py + 4, fmt(yv), 'end', 11));
    }
    out.push(text((f.left + f.width - f.right) / 2, f.height - 10, xLabel, 'middle'));
    out.push(
        `<text x="14" y="${(f.top + f.height - f.bottom) / 2}" text-anchor="middle" ` +
        `font-family="sans-serif" font-size="12" fill="#222" ` +
        `transform="rotate(-90 14 ${(f.top + f.height - f.bottom) / 2})">${esc(yLabel)}</text>`,
    );
    return out;
}

export function svgDoc(width: number, height: number, body: string[]): string {
    return [
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}">`,
        `<rect width="${width}" height="${height}" fill="white"/>`,
        ...body,
        '</svg>',
        '',
    ].join('\n');
}
