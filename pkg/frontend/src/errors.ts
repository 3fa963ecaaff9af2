/** A column required by the requested figure is absent from the CSV header. */
export class MissingColumn extends Error {
    constructor(column: string, have: readonly string[]) {
        super(`missing column "${column}" (file has: ${have.join(', ')})`);
        this.name = 'MissingColumn';
    }
}

/** The CSV parsed fine but holds no data rows. */
export class EmptyTable extends Error {
    constructor(path: string) {
        super(`no data rows in ${path}`);
        this.name = 'EmptyTable';
    }
}
