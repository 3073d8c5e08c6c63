/**
 * Synchronous advantage actor-critic over N remote environments.
 *
 * Classic recipe: short n-step rollouts collected in lockstep across
 * the connections, bootstrapped discounted returns, one gradient step
 * per rollout on combined policy / value / entropy losses, global-norm
 * gradient clipping, Adam. Episode lengths stream into a rolling-mean
 * curve compatible with the benchmark harness's curve CSV.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';
import * as tf from '@tensorflow/tfjs';
import { curveCsv, rollingMean } from './curve.js';
import { PolicyValueNet } from './model.js';
import { RemoteEnv } from './remoteEnv.js';
import { makeRng, sampleIndex } from './rng.js';
import { stableSeed48 } from './seeds.js';

export interface TrainOptions {
  steps: number;
  nSteps?: number;
  gamma?: number;
  lr?: number;
  valueCoef?: number;
  entropyCoef?: number;
  maxGradNorm?: number;
  seed?: number;
  advantageNorm?: boolean;
  startDates?: string[];
  curveWindow?: number;
  logEvery?: number;
  outDir?: string;
  checkpointEvery?: number;
}

export interface TrainResult {
  episodeLengths: number[];
  episodeValidated: number[];
  updates: number;
  envSteps: number;
}

interface EnvSlot {
  env: RemoteEnv;
  obs: Float32Array;
  stepsInEpisode: number;
  rewardInEpisode: number;
  episode: number;
}

export async function trainA2C(
  envs: RemoteEnv[],
  net: PolicyValueNet,
  options: TrainOptions,
): Promise<TrainResult> {
  const o = {
    nSteps: 5,
    gamma: 0.99,
    lr: 7e-4,
    valueCoef: 0.5,
    entropyCoef: 0.01,
    maxGradNorm: 0.5,
    seed: 0,
    advantageNorm: true,
    startDates: [] as string[],
    curveWindow: 100,
    logEvery: 0,
    checkpointEvery: 0,
    ...options,
  };
  const n = envs.length;
  if (n === 0) throw new Error('need at least one environment');
  const [h, w, c] = envs[0].observationShape;
  const actions = envs[0].actionCount;

  const startDateFor = (slotIdx: number, episode: number): string | undefined =>
    o.startDates.length ? o.startDates[(slotIdx + episode) % o.startDates.length] : undefined;

  const slots: EnvSlot[] = [];
  for (let i = 0; i < n; i++) {
    const seed = stableSeed48('train', o.seed, i, 0);
    slots.push({
      env: envs[i],
      obs: await envs[i].reset(seed, startDateFor(i, 0)),
      stepsInEpisode: 0,
      rewardInEpisode: 0,
      episode: 0,
    });
  }

  const rng = makeRng(o.seed + 0x5eed);
  const optimizer = tf.train.adam(o.lr);
  const episodeLengths: number[] = [];
  const episodeValidated: number[] = [];
  let envSteps = 0;
  let updates = 0;
  const t0 = Date.now();

  const batchTensor = (rows: Float32Array[]): tf.Tensor4D => {
    const flat = new Float32Array(rows.length * h * w * c);
    rows.forEach((row, i) => flat.set(row, i * h * w * c));
    return tf.tensor4d(flat, [rows.length, h, w, c]);
  };

  try {
    while (envSteps < o.steps) {
      const obsBuf: Float32Array[] = [];
      const actBuf: number[] = [];
      const rewBuf: number[] = [];
      const doneBuf: boolean[] = [];
      const valBuf: number[] = [];

      for (let stepIdx = 0; stepIdx < o.nSteps; stepIdx++) {
        const obsT = batchTensor(slots.map((s) => s.obs));
        const [probs, values] = tf.tidy(() => {
          const { logits, value } = net.forward(obsT);
          return [
            tf.softmax(logits).dataSync() as Float32Array,
            value.dataSync() as Float32Array,
          ];
        });
        obsT.dispose();

        const chosen = slots.map((_, i) =>
          sampleIndex(probs.subarray(i * actions, (i + 1) * actions), rng),
        );
        const results = await Promise.all(slots.map((s, i) => s.env.step(chosen[i])));

        for (let i = 0; i < n; i++) {
          const slot = slots[i];
          obsBuf.push(slot.obs);
          actBuf.push(chosen[i]);
          rewBuf.push(results[i].reward);
          doneBuf.push(results[i].done);
          valBuf.push(values[i]);
          slot.stepsInEpisode += 1;
          slot.rewardInEpisode += results[i].reward;
          if (results[i].done) {
            episodeLengths.push(slot.stepsInEpisode);
            episodeValidated.push(slot.rewardInEpisode);
            slot.episode += 1;
            slot.stepsInEpisode = 0;
            slot.rewardInEpisode = 0;
            const seed = stableSeed48('train', o.seed, i, slot.episode);
            slot.obs = await slot.env.reset(seed, startDateFor(i, slot.episode));
          } else {
            slot.obs = results[i].observation;
          }
        }
        envSteps += n;
      }

      // bootstrap from the value of the post-rollout observations
      const lastT = batchTensor(slots.map((s) => s.obs));
      const bootstrap = tf.tidy(() => net.forward(lastT).value.dataSync() as Float32Array);
      lastT.dispose();

      const returns = new Float32Array(n * o.nSteps);
      for (let i = 0; i < n; i++) {
        let r = bootstrap[i];
        for (let stepIdx = o.nSteps - 1; stepIdx >= 0; stepIdx--) {
          const idx = stepIdx * n + i;
          r = rewBuf[idx] + o.gamma * (doneBuf[idx] ? 0 : r);
          returns[idx] = r;
        }
      }
      const advantages = new Float32Array(n * o.nSteps);
      for (let idx = 0; idx < advantages.length; idx++) advantages[idx] = returns[idx] - valBuf[idx];
      if (o.advantageNorm) {
        let mean = 0;
        for (const a of advantages) mean += a;
        mean /= advantages.length;
        let variance = 0;
        for (const a of advantages) variance += (a - mean) * (a - mean);
        const std = Math.sqrt(variance / advantages.length) + 1e-8;
        for (let idx = 0; idx < advantages.length; idx++) advantages[idx] = (advantages[idx] - mean) / std;
      }

      const xT = batchTensor(obsBuf);
      const actT = tf.tensor1d(actBuf, 'int32');
      const retT = tf.tensor1d(returns);
      const advT = tf.tensor1d(advantages);
      const { grads } = tf.variableGrads(() => {
        const { logits, value } = net.forward(xT);
        const logp = tf.logSoftmax(logits);
        const onHot = tf.oneHot(actT, actions);
        const actionLogp = tf.sum(tf.mul(logp, onHot), 1);
        const policyLoss = tf.neg(tf.mean(tf.mul(actionLogp, advT)));
        const valueLoss = tf.mean(tf.square(tf.sub(retT, value)));
        const negEntropy = tf.mean(tf.sum(tf.mul(tf.softmax(logits), logp), 1));
        return tf.add(
          tf.add(policyLoss, tf.mul(o.valueCoef, valueLoss)),
          tf.mul(o.entropyCoef, negEntropy),
        ) as tf.Scalar;
      }, net.trainables());
      applyClipped(optimizer, grads, o.maxGradNorm);
      tf.dispose([xT, actT, retT, advT]);
      updates += 1;

      if (o.logEvery && updates % o.logEvery === 0) {
        const recent = episodeLengths.slice(-o.curveWindow);
        const recentV = episodeValidated.slice(-o.curveWindow);
        const mean = recent.length ? recent.reduce((a, b) => a + b, 0) / recent.length : NaN;
        const meanV = recentV.length ? recentV.reduce((a, b) => a + b, 0) / recentV.length : NaN;
        const rate = envSteps / ((Date.now() - t0) / 1000);
        console.log(
          `update ${updates}  steps ${envSteps}  episodes ${episodeLengths.length}  ` +
            `mean length(${recent.length}) ${mean.toFixed(1)}  mean validated ${meanV.toFixed(1)}  ` +
            `${rate.toFixed(0)} steps/s`,
        );
      }
      if (o.outDir && o.checkpointEvery && updates % o.checkpointEvery === 0) {
        await net.save(path.join(o.outDir, 'checkpoint.json'), { envSteps, updates });
      }
    }
  } catch (err) {
    if (o.outDir) {
      await net.save(path.join(o.outDir, 'interrupted.json'), { envSteps, updates });
    }
    throw err;
  }

  if (o.outDir) {
    fs.mkdirSync(o.outDir, { recursive: true });
    await net.save(path.join(o.outDir, 'checkpoint.json'), { envSteps, updates });
    fs.writeFileSync(
      path.join(o.outDir, 'curve.csv'),
      curveCsv(rollingMean(episodeLengths, o.curveWindow)),
    );
  }
  return { episodeLengths, episodeValidated, updates, envSteps };
}

function applyClipped(
  optimizer: tf.Optimizer,
  grads: tf.NamedTensorMap,
  maxNorm: number,
): void {
  tf.tidy(() => {
    const names = Object.keys(grads);
    const squares = names.map((name) => tf.sum(tf.square(grads[name])));
    const globalNorm = tf.sqrt(tf.addN(squares));
    const scale = tf.minimum(tf.scalar(1), tf.div(maxNorm, tf.add(globalNorm, 1e-8)));
    const clipped: tf.NamedTensorMap = {};
    for (const name of names) clipped[name] = tf.mul(grads[name], scale);
    optimizer.applyGradients(clipped);
  });
  tf.dispose(grads);
}
