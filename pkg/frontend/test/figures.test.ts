import { existsSync, mkdtempSync, readFileSync, statSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { describe, expect, it } from 'vitest';
import { EmptyTable, MissingColumn } from '../src/errors.js';
import { render } from '../src/figures.js';

const here = dirname(fileURLToPath(import.meta.url));
const fx = (name: string) => join(here, 'fixtures', name);
const outDir = mkdtempSync(join(tmpdir(), 'figures-'));

/** The exact literal after `"key":` in a fixture file, independent of src/. */
function literal(path: string, key: string): string {
    const m = readFileSync(path, 'utf8').match(new RegExp(`"${key}":\\s*([-0-9.eE+]+)`));
    if (!m) {
        throw new Error(`fixture has no "${key}"`);
    }
    return m[1];
}

describe('rendering from solver sweep artifacts', () => {
    it('sweep_convergence renders and embeds both limit literals', () => {
        const out = join(outDir, 'sweep.svg');
        const svg = render({
            kind: 'sweep_convergence',
            csvPaths: [fx('sweep.csv')],
            predictionsPath: fx('predictions.json'),
            outputPath: out,
        });
        expect(existsSync(out)).toBe(true);
        expect(statSync(out).size).toBeGreaterThan(0);
        expect(svg.startsWith('<svg')).toBe(true);
        expect(svg).toContain(literal(fx('predictions.json'), 'sup_limit'));
        expect(svg).toContain(literal(fx('predictions.json'), 'beta_semi_limit'));
    });

    it('eigen_limit renders and embeds the exact target literal', () => {
        const out = join(outDir, 'eigen.svg');
        const svg = render({
            kind: 'eigen_limit',
            csvPaths: [fx('eigen.csv')],
            predictionsPath: fx('eigen.json'),
            outputPath: out,
        });
        expect(statSync(out).size).toBeGreaterThan(0);
        expect(svg).toContain(literal(fx('eigen.json'), 'target'));
    });

    it('maxpoint_map renders with the final marker inside the domain frame', () => {
        const out = join(outDir, 'map.svg');
        const svg = render({
            kind: 'maxpoint_map',
            csvPaths: [fx('sweep.csv'), fx('domain.csv')],
            predictionsPath: fx('predictions.json'),
            outputPath: out,
        });
        expect(statSync(out).size).toBeGreaterThan(0);
        expect(svg).toContain(literal(fx('predictions.json'), 'depth_limit'));

        const mark = svg.match(/<circle class="maxpoint" cx="([\d.]+)" cy="([\d.]+)"/);
        const frame = svg.match(
            /<rect class="domain-frame" x="([\d.]+)" y="([\d.]+)" width="([\d.]+)" height="([\d.]+)"/,
        );
        expect(mark).not.toBeNull();
        expect(frame).not.toBeNull();
        const [cx, cy] = [Number(mark![1]), Number(mark![2])];
        const [x, y, w, h] = [1, 2, 3, 4].map(i => Number(frame![i]));
        expect(cx).toBeGreaterThan(x);
        expect(cx).toBeLessThan(x + w);
        expect(cy).toBeGreaterThan(y);
        expect(cy).toBeLessThan(y + h);
    });
});

describe('input rejection', () => {
    it('raises MissingColumn when a required column is absent', () => {
        const bad = join(outDir, 'bad.csv');
        writeFileSync(bad, 'p,semi_beta\n10,0.5\n');
        expect(() => render({
            kind: 'sweep_convergence',
            csvPaths: [bad],
            predictionsPath: fx('predictions.json'),
            outputPath: join(outDir, 'never.svg'),
        })).toThrow(MissingColumn);
    });

    it('raises EmptyTable on a header-only CSV', () => {
        const empty = join(outDir, 'empty.csv');
        writeFileSync(empty, 'p,sup_norm,semi_beta\n');
        expect(() => render({
            kind: 'eigen_limit',
            csvPaths: [empty],
            predictionsPath: fx('eigen.json'),
            outputPath: join(outDir, 'never.svg'),
        })).toThrow(EmptyTable);
    });
});
