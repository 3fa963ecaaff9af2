import { render } from './figures.js';

const [csv, predictions, out] = process.argv.slice(2);
if (!csv || !predictions || !out) {
    console.error('usage: main_sweep_convergence <sweep.csv> <predictions.json> <out.svg>');
    process.exit(2);
}
render({ kind: 'sweep_convergence', csvPaths: [csv], predictionsPath: predictions, outputPath: out });
console.log(`wrote ${out}`);
