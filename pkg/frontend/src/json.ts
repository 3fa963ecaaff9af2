import { readFileSync } from 'node:fs';

export interface JsonDoc {
    /** Parsed document, for numeric use (axis placement, scaling). */
    doc: any;
    /** Raw file text, for lifting exact numeric literals into labels. */
    text: string;
}

export function readJsonDoc(path: string): JsonDoc {
    const text = readFileSync(path, 'utf8');
    return { doc: JSON.parse(text), text };
}

/**
 * The exact numeric literal printed after `"key":` in the file. Labels built
 * from this string reproduce the producer's 17-digit formatting byte for
 * byte, which JSON.parse + String() would not (it re-shortens the decimal).
 */
export function rawNumber(d: JsonDoc, key: string): string {
    const m = d.text.match(new RegExp(`"${key}"\\s*:\\s*(-?[0-9][0-9+\\-.eE]*)`));
    if (!m) {
        throw new Error(`no numeric field "${key}" in the JSON document`);
    }
    return m[1];
}
