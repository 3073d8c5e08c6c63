/** Rolling-mean episode-length curve, schema-compatible with the harness. */

export function rollingMean(values: number[], window: number): number[] {
  if (window < 1) throw new Error(`window must be >= 1, got ${window}`);
  const out: number[] = [];
  let sum = 0;
  for (let i = 0; i < values.length; i++) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    out.push(sum / Math.min(i + 1, window));
  }
  return out;
}

export function curveCsv(means: number[]): string {
  const lines = ['step,mean_length'];
  means.forEach((m, i) => lines.push(`${i},${m}`));
  return lines.join('\n') + '\n';
}
