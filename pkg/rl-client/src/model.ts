/**
 * Convolutional policy/value network.
 *
 * Three same-padded conv layers with decreasing kernels (7x7, 3x3,
 * 1x1), 128 filters each, ReLU, then two dense heads off the flattened
 * features: a 1-unit state value and an action_count-unit policy.
 *
 * Convolutions go through a custom gradient for two reasons: the WASM
 * backend ships no Conv2DBackpropFilter kernel at all, and its
 * valid-padding convolution is an order of magnitude faster than the
 * same-padding and transposed variants. So forward and both gradients
 * are expressed as explicit pad + valid conv2d: the input gradient
 * convolves the padded upstream gradient with the spatially flipped,
 * channel-swapped filter, and the filter gradient uses the classic
 * transpose trick (swap batch and channel axes, convolve with the
 * upstream gradient as the filter). Semantics are exactly those of
 * tf.conv2d with stride 1 and 'same' padding; the test suite checks
 * both gradients against the CPU backend's autodiff and against
 * finite differences.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';
import * as tf from '@tensorflow/tfjs';
import { makeRng } from './rng.js';

export function convSame(x: tf.Tensor4D, w: tf.Tensor4D): tf.Tensor4D {
  const op = tf.customGrad((xi, wi, save) => {
    const xt = xi as tf.Tensor4D;
    const wt = wi as tf.Tensor4D;
    const pad = (wt.shape[0] - 1) / 2; // odd kernels only
    const xPad = pad ? tf.pad(xt, [[0, 0], [pad, pad], [pad, pad], [0, 0]]) : xt;
    const y = tf.conv2d(xPad as tf.Tensor4D, wt, 1, 'valid');
    (save as tf.GradSaveFunc)([xt, wt]);
    return {
      value: y,
      gradFunc: (dy: tf.Tensor, saved: tf.Tensor[]) => {
        const [xs, ws] = saved as [tf.Tensor4D, tf.Tensor4D];
        const dyT = dy as tf.Tensor4D;
        const p = (ws.shape[0] - 1) / 2;
        // dX: pad dY, convolve with the 180-degree-rotated, in/out-swapped filter
        const dyPad = p ? tf.pad(dyT, [[0, 0], [p, p], [p, p], [0, 0]]) : dyT;
        const wSwap = tf.transpose(p ? tf.reverse(ws, [0, 1]) : ws, [0, 1, 3, 2]);
        const dx = tf.conv2d(dyPad as tf.Tensor4D, wSwap as tf.Tensor4D, 1, 'valid');
        // dW[kh,kw,ci,co] = sum_b,y,x Xpad[b,y+kh,x+kw,ci] * dY[b,y,x,co]
        const xPad2 = p ? tf.pad(xs, [[0, 0], [p, p], [p, p], [0, 0]]) : xs;
        const xT = tf.transpose(xPad2, [3, 1, 2, 0]); // (ci, Hp, Wp, b)
        const dyF = tf.transpose(dyT, [1, 2, 0, 3]); // (H, W, b, co) as a filter
        const dwT = tf.conv2d(xT as tf.Tensor4D, dyF as unknown as tf.Tensor4D, 1, 'valid');
        const dw = tf.transpose(dwT, [1, 2, 0, 3]); // (kh, kw, ci, co)
        return [dx, dw];
      },
    };
  });
  return op(x, w) as tf.Tensor4D;
}

export interface NetConfig {
  nLat: number;
  nLon: number;
  depth: number; // observation channels = n_pass + 1
  actionCount: number; // K + 1
  filters?: number;
}

interface VarSpec {
  name: string;
  shape: number[];
  fanIn: number;
  fanOut: number;
  zero?: boolean;
}

export class PolicyValueNet {
  private static instances = 0;

  readonly config: Required<NetConfig>;
  readonly vars: Record<string, tf.Variable>;

  constructor(config: NetConfig, seed = 1, weights?: Record<string, Float32Array>) {
    // tf registers variables by name process-wide; prefix per instance
    const prefix = `pvnet${PolicyValueNet.instances++}/`;
    this.config = { filters: 128, ...config };
    const f = this.config.filters;
    const flat = this.config.nLat * this.config.nLon * f;
    const specs: VarSpec[] = [
      { name: 'conv1/w', shape: [7, 7, config.depth, f], fanIn: 49 * config.depth, fanOut: 49 * f },
      { name: 'conv1/b', shape: [f], fanIn: 0, fanOut: 0, zero: true },
      { name: 'conv2/w', shape: [3, 3, f, f], fanIn: 9 * f, fanOut: 9 * f },
      { name: 'conv2/b', shape: [f], fanIn: 0, fanOut: 0, zero: true },
      { name: 'conv3/w', shape: [1, 1, f, f], fanIn: f, fanOut: f },
      { name: 'conv3/b', shape: [f], fanIn: 0, fanOut: 0, zero: true },
      { name: 'policy/w', shape: [flat, config.actionCount], fanIn: flat, fanOut: config.actionCount },
      { name: 'policy/b', shape: [config.actionCount], fanIn: 0, fanOut: 0, zero: true },
      { name: 'value/w', shape: [flat, 1], fanIn: flat, fanOut: 1 },
      { name: 'value/b', shape: [1], fanIn: 0, fanOut: 0, zero: true },
    ];
    const rng = makeRng(seed);
    this.vars = {};
    for (const spec of specs) {
      const size = spec.shape.reduce((a, b) => a * b, 1);
      let data: Float32Array;
      if (weights) {
        data = weights[spec.name];
        if (!data || data.length !== size) {
          throw new Error(`checkpoint is missing or mis-sized variable ${spec.name}`);
        }
      } else if (spec.zero) {
        data = new Float32Array(size);
      } else {
        // Glorot uniform
        const limit = Math.sqrt(6 / (spec.fanIn + spec.fanOut));
        data = new Float32Array(size);
        for (let i = 0; i < size; i++) data[i] = (2 * rng() - 1) * limit;
      }
      this.vars[spec.name] = tf.variable(tf.tensor(data, spec.shape), true, prefix + spec.name);
    }
  }

  /** Forward pass; returns policy logits (b, actions) and value (b). */
  forward(x: tf.Tensor4D): { logits: tf.Tensor2D; value: tf.Tensor1D } {
    const v = this.vars;
    const h1 = tf.relu(tf.add(convSame(x, v['conv1/w'] as tf.Tensor4D), v['conv1/b']));
    const h2 = tf.relu(tf.add(convSame(h1 as tf.Tensor4D, v['conv2/w'] as tf.Tensor4D), v['conv2/b']));
    const h3 = tf.relu(tf.add(convSame(h2 as tf.Tensor4D, v['conv3/w'] as tf.Tensor4D), v['conv3/b']));
    const flat = tf.reshape(h3, [x.shape[0], -1]) as tf.Tensor2D;
    const logits = tf.add(tf.matMul(flat, v['policy/w'] as tf.Tensor2D), v['policy/b']) as tf.Tensor2D;
    const value = tf.reshape(
      tf.add(tf.matMul(flat, v['value/w'] as tf.Tensor2D), v['value/b']),
      [x.shape[0]],
    ) as tf.Tensor1D;
    return { logits, value };
  }

  policyProbs(x: tf.Tensor4D): tf.Tensor2D {
    return tf.tidy(() => tf.softmax(this.forward(x).logits));
  }

  trainables(): tf.Variable[] {
    return Object.values(this.vars);
  }

  async weightData(): Promise<Record<string, Float32Array>> {
    const out: Record<string, Float32Array> = {};
    for (const [name, variable] of Object.entries(this.vars)) {
      out[name] = (await variable.data()) as Float32Array;
    }
    return out;
  }

  async save(file: string, extra: Record<string, unknown> = {}): Promise<void> {
    const weights: Record<string, { shape: number[]; data: string }> = {};
    for (const [name, variable] of Object.entries(this.vars)) {
      const data = (await variable.data()) as Float32Array;
      weights[name] = {
        shape: variable.shape.slice(),
        data: Buffer.from(data.buffer, data.byteOffset, data.byteLength).toString('base64'),
      };
    }
    const doc = { format: 'eosched-rl-checkpoint-v1', config: this.config, ...extra, weights };
    fs.mkdirSync(path.dirname(path.resolve(file)), { recursive: true });
    fs.writeFileSync(file, JSON.stringify(doc));
  }

  static load(file: string): { net: PolicyValueNet; meta: Record<string, unknown> } {
    const doc = JSON.parse(fs.readFileSync(file, 'utf8'));
    if (doc.format !== 'eosched-rl-checkpoint-v1') {
      throw new Error(`not a checkpoint file: ${file}`);
    }
    const weights: Record<string, Float32Array> = {};
    for (const [name, entry] of Object.entries<{ shape: number[]; data: string }>(doc.weights)) {
      const raw = Buffer.from(entry.data, 'base64');
      const arr = new Float32Array(raw.byteLength / 4);
      for (let i = 0; i < arr.length; i++) arr[i] = raw.readFloatLE(i * 4);
      weights[name] = arr;
    }
    const { weights: _w, config, format: _f, ...meta } = doc;
    return { net: new PolicyValueNet(config, 1, weights), meta };
  }

  dispose(): void {
    for (const variable of Object.values(this.vars)) variable.dispose();
  }
}
