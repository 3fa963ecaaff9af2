import { readFileSync } from 'node:fs';
import { EmptyTable, MissingColumn } from './errors.js';

export interface Table {
    path: string;
    columns: string[];
    /** rows[i][j] = numeric value of column j in data row i (NaN for blanks). */
    rows: number[][];
}

/**
 * Read one of the solver CLI's CSV files. The format is strict: a single
 * header line, comma separation, no quoting, numeric cells (blank allowed,
 * parsed as NaN — the viscosity table leaves excluded residuals empty).
 */
export function readTable(path: string): Table {
    const lines = readFileSync(path, 'utf8').split('\n').filter(l => l.length > 0);
    if (lines.length === 0) {
        throw new EmptyTable(path);
    }
    const columns = lines[0].split(',');
    const rows = lines.slice(1).map(line =>
        line.split(',').map(cell => (cell === '' ? NaN : Number(cell))),
    );
    if (rows.length === 0) {
        throw new EmptyTable(path);
    }
    return { path, columns, rows };
}

/** Column values by name; MissingColumn if the header lacks it. */
export function column(t: Table, name: string): number[] {
    const j = t.columns.indexOf(name);
    if (j < 0) {
        throw new MissingColumn(name, t.columns);
    }
    return t.rows.map(r => r[j]);
}

/** Fail fast on every absent column before any drawing starts. */
export function requireColumns(t: Table, names: readonly string[]): void {
    for (const name of names) {
        if (!t.columns.includes(name)) {
            throw new MissingColumn(name, t.columns);
        }
    }
}
