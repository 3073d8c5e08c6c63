/**
 * Policy evaluation producing harness-compatible episode CSV rows.
 *
 * Greedy mode takes the argmax action (deterministic per checkpoint
 * and seeds); sample mode draws from the policy distribution with a
 * per-episode seeded generator (used for untrained baselines).
 */

import * as tf from '@tensorflow/tfjs';
import { PolicyValueNet } from './model.js';
import { RemoteEnv } from './remoteEnv.js';
import { makeRng, sampleIndex } from './rng.js';
import { stableSeed48 } from './seeds.js';

export interface EvalEpisodeSpec {
  seed: number;
  startDate?: string;
  weatherSeed: number;
}

export interface EvalRow {
  agent_name: string;
  seed: number;
  start_date: string;
  weather_seed: number;
  length: number;
  validated_count: number;
  discounted_return: number;
  capped: boolean;
}

export interface EvalOptions {
  agentName: string;
  gamma?: number;
  mode?: 'greedy' | 'sample';
}

export function episodeSpecs(
  agentName: string,
  masterSeed: number,
  dates: (string | undefined)[],
  weatherSeeds: number[],
): EvalEpisodeSpec[] {
  const specs: EvalEpisodeSpec[] = [];
  for (const date of dates) {
    for (const ws of weatherSeeds) {
      specs.push({
        seed: stableSeed48(masterSeed, agentName, date ?? '', ws),
        startDate: date,
        weatherSeed: ws,
      });
    }
  }
  return specs;
}

export async function evaluatePolicy(
  env: RemoteEnv,
  net: PolicyValueNet,
  episodes: EvalEpisodeSpec[],
  options: EvalOptions,
): Promise<EvalRow[]> {
  const gamma = options.gamma ?? 0.99;
  const mode = options.mode ?? 'greedy';
  const [h, w, c] = env.observationShape;
  const k = env.spec.K;
  const rows: EvalRow[] = [];

  for (const episode of episodes) {
    let obs = await env.reset(episode.seed, episode.startDate);
    const rng = makeRng(episode.seed % 0xffffffff);
    let length = 0;
    let validated = 0;
    let discounted = 0;
    let discount = 1;
    for (;;) {
      const action = tf.tidy(() => {
        const x = tf.tensor4d(obs, [1, h, w, c]);
        const { logits } = net.forward(x);
        if (mode === 'greedy') {
          return tf.argMax(logits, 1).dataSync()[0];
        }
        const probs = tf.softmax(logits).dataSync() as Float32Array;
        return sampleIndex(probs, rng);
      });
      const result = await env.step(action);
      length += 1;
      validated += result.reward;
      discounted += discount * result.reward;
      discount *= gamma;
      obs = result.observation;
      if (result.done) break;
    }
    rows.push({
      agent_name: options.agentName,
      seed: episode.seed,
      start_date: episode.startDate ?? '',
      weather_seed: episode.weatherSeed,
      length,
      validated_count: Math.round(validated),
      discounted_return: discounted,
      capped: Math.round(validated) < k,
    });
  }
  return rows;
}

/** Same column order as the harness episode CSV, so files merge. */
export function rowsToCsv(rows: EvalRow[]): string {
  const header = 'agent_name,seed,start_date,weather_seed,length,validated_count,discounted_return,capped';
  const lines = rows.map((r) =>
    [
      r.agent_name,
      r.seed,
      r.start_date,
      r.weather_seed,
      r.length,
      r.validated_count,
      r.discounted_return,
      r.capped ? 'true' : 'false',
    ].join(','),
  );
  return [header, ...lines].join('\n') + '\n';
}

export function meanLength(rows: EvalRow[]): number {
  return rows.reduce((a, r) => a + r.length, 0) / rows.length;
}
