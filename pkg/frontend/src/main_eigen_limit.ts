import { render } from './figures.js';

const [csv, predictions, out] = process.argv.slice(2);
if (!csv || !predictions || !out) {
    console.error('usage: main_eigen_limit <eigen.csv> <eigen.json> <out.svg>');
    process.exit(2);
}
render({ kind: 'eigen_limit', csvPaths: [csv], predictionsPath: predictions, outputPath: out });
console.log(`wrote ${out}`);
