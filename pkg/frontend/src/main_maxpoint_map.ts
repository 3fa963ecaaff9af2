import { render } from './figures.js';

const [sweepCsv, domainCsv, predictions, out] = process.argv.slice(2);
if (!sweepCsv || !domainCsv || !predictions || !out) {
    console.error('usage: main_maxpoint_map <sweep.csv> <domain.csv> <predictions.json> <out.svg>');
    process.exit(2);
}
render({
    kind: 'maxpoint_map',
    csvPaths: [sweepCsv, domainCsv],
    predictionsPath: predictions,
    outputPath: out,
});
console.log(`wrote ${out}`);
