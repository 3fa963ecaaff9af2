import { writeFileSync } from 'node:fs';
import { column, readTable, requireColumns, Table } from './table.js';
import { rawNumber, readJsonDoc } from './json.js';
import {
    axes, circle, DEFAULT_FRAME, Frame, includeValue, polyline, rect,
    scaleOf, spanOf, svgDoc, text,
} from './svg.js';

export type FigureKind = 'sweep_convergence' | 'eigen_limit' | 'maxpoint_map';

export interface FigureSpec {
    kind: FigureKind;
    /**
     * sweep_convergence: [sweep.csv]; eigen_limit: [eigen.csv];
     * maxpoint_map: [sweep.csv, domain.csv].
     */
    csvPaths: string[];
    /** Limit-value sidecar: predictions.json, or eigen.json for eigen_limit. */
    predictionsPath: string;
    outputPath: string;
}

/**
 * Draw one figure and write it to spec.outputPath (SVG). Returns the markup.
 * Every physical number in the figure is read from the input files; nothing
 * is recomputed here beyond pixel placement.
 */
export function render(spec: FigureSpec): string {
    let svg: string;
    switch (spec.kind) {
        case 'sweep_convergence':
            svg = sweepConvergence(spec);
            break;
        case 'eigen_limit':
            svg = eigenLimit(spec);
            break;
        case 'maxpoint_map':
            svg = maxpointMap(spec);
            break;
        default:
            throw new Error(`unknown figure kind "${(spec as FigureSpec).kind}"`);
    }
    writeFileSync(spec.outputPath, svg);
    return svg;
}

interface Series {
    values: number[];
    limit: number;
    label: string; // carries the sidecar's exact numeric literal
    color: string;
}

/** Shared body of the two convergence charts: series, dashed limits, legend. */
function convergenceChart(
    f: Frame, x: number[], series: Series[], xLabel: string, yLabel: string,
): string[] {
    const xs = spanOf(x);
    let ys = spanOf(series.flatMap(s => s.values));
    for (const s of series) {
        ys = includeValue(ys, s.limit);
    }
    const sx = scaleOf(xs, f.left, f.width - f.right);
    const sy = scaleOf(ys, f.height - f.bottom, f.top);
    const body = axes(f, xs, ys, xLabel, yLabel);
    series.forEach((s, k) => {
        const yLim = sy(s.limit);
        body.push(polyline(
            [[f.left, yLim], [f.width - f.right, yLim]], s.color, '6,4'));
        body.push(polyline(x.map((xi, i) => [sx(xi), sy(s.values[i])]), s.color));
        for (let i = 0; i < x.length; i++) {
            body.push(circle(sx(x[i]), sy(s.values[i]), 3, s.color));
        }
        body.push(text(f.width - f.right - 6, f.top + 16 + 16 * k, s.label, 'end', 12, s.color));
    });
    return body;
}

function sweepConvergence(spec: FigureSpec): string {
    const t = readTable(spec.csvPaths[0]);
    requireColumns(t, ['p', 'sup_norm', 'semi_beta']);
    const side = readJsonDoc(spec.predictionsPath);
    const f = DEFAULT_FRAME;
    const body = convergenceChart(f, column(t, 'p'), [
        {
            values: column(t, 'sup_norm'),
            limit: Number(side.doc.predictions.sup_limit),
            label: `sup_norm limit = ${rawNumber(side, 'sup_limit')}`,
            color: '#1f77b4',
        },
        {
            values: column(t, 'semi_beta'),
            limit: Number(side.doc.predictions.beta_semi_limit),
            label: `semi_beta limit = ${rawNumber(side, 'beta_semi_limit')}`,
            color: '#d62728',
        },
    ], 'p', 'value');
    body.push(text(f.left, 20, 'sweep convergence to the asymptotic values'));
    return svgDoc(f.width, f.height, body);
}

function eigenLimit(spec: FigureSpec): string {
    const t = readTable(spec.csvPaths[0]);
    requireColumns(t, ['m', 'lambda_root']);
    const side = readJsonDoc(spec.predictionsPath);
    const f = DEFAULT_FRAME;
    const body = convergenceChart(f, column(t, 'm'), [
        {
            values: column(t, 'lambda_root'),
            limit: Number(side.doc.target),
            label: `1/R^s = ${rawNumber(side, 'target')}`,
            color: '#2ca02c',
        },
    ], 'm', 'lambda^(1/m)');
    body.push(text(f.left, 20, 'm-th root of the Rayleigh minimum vs its limit'));
    return svgDoc(f.width, f.height, body);
}

const hexToRgb = (hex: string): [number, number, number] => {
    const n = parseInt(hex.slice(1), 16);
    return [(n >> 16) & 255, (n >> 8) & 255, n & 255];
};

/** Two-anchor color ramp for the distance field (deep blue -> warm yellow). */
function rampColor(t: number): string {
    const a = hexToRgb('#00224d');
    const b = hexToRgb('#ffd633');
    const mix = a.map((v, i) => Math.round(v + (b[i] - v) * t));
    return `#${mix.map(v => v.toString(16).padStart(2, '0')).join('')}`;
}

interface DomainNodes {
    x: number[];
    y: number[];
    dist: number[];
}

function interiorNodes(dom: Table): DomainNodes {
    const x = column(dom, 'x');
    const y = column(dom, 'y');
    const inter = column(dom, 'interior');
    const dist = column(dom, 'distance');
    const keep = inter.map((v, i) => i).filter(i => inter[i] === 1);
    return {
        x: keep.map(i => x[i]),
        y: keep.map(i => y[i]),
        dist: keep.map(i => dist[i]),
    };
}

function maxpointMap(spec: FigureSpec): string {
    const sweep = readTable(spec.csvPaths[0]);
    requireColumns(sweep, ['p', 'x_p_x', 'x_p_y']);
    const nodes = interiorNodes(readTable(spec.csvPaths[1]));
    const side = readJsonDoc(spec.predictionsPath);
    const h = Number(side.doc.grid.h);

    const f: Frame = { width: 560, height: 600, left: 50, right: 20, top: 40, bottom: 64 };
    // one common scale for both axes so grid cells stay square
    const xLo = Math.min(...nodes.x) - h / 2;
    const xHi = Math.max(...nodes.x) + h / 2;
    const yLo = Math.min(...nodes.y) - h / 2;
    const yHi = Math.max(...nodes.y) + h / 2;
    const k = Math.min(
        (f.width - f.left - f.right) / (xHi - xLo),
        (f.height - f.top - f.bottom) / (yHi - yLo),
    );
    const px = (x: number) => f.left + (x - xLo) * k;
    const py = (y: number) => f.top + (yHi - y) * k; // y grows upward on paper

    const dMax = Math.max(...nodes.dist);
    const body: string[] = [];
    for (let i = 0; i < nodes.x.length; i++) {
        body.push(rect(
            px(nodes.x[i] - h / 2), py(nodes.y[i] + h / 2), h * k, h * k,
            rampColor(dMax > 0 ? nodes.dist[i] / dMax : 0),
        ));
    }
    body.push(
        `<rect class="domain-frame" x="${px(xLo).toFixed(2)}" y="${py(yHi).toFixed(2)}" ` +
        `width="${((xHi - xLo) * k).toFixed(2)}" height="${((yHi - yLo) * k).toFixed(2)}" ` +
        `fill="none" stroke="#444"/>`,
    );

    const tx = column(sweep, 'x_p_x');
    const ty = column(sweep, 'x_p_y');
    const pVals = column(sweep, 'p');
    if (tx.length > 1) {
        body.push(polyline(tx.map((x, i) => [px(x), py(ty[i])]), '#ffffff', '3,3'));
    }
    for (let i = 0; i < tx.length; i++) {
        body.push(circle(px(tx[i]), py(ty[i]), 3, '#ffffff'));
    }
    const last = tx.length - 1;
    body.push(circle(px(tx[last]), py(ty[last]), 5, '#d62728', 'maxpoint'));

    body.push(text(f.left, 20, 'max-point trajectory over the distance field'));
    body.push(text(f.left, f.height - 36,
        `p = ${pVals[0]} ... ${pVals[last]}; red marker: final max point`, 'start', 11));
    body.push(text(f.left, f.height - 20,
        `depth limit (inradius) = ${rawNumber(side, 'depth_limit')}`, 'start', 11));
    return svgDoc(f.width, f.height, body);
}
