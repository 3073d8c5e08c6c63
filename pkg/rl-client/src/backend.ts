/**
 * TensorFlow.js backend selection.
 *
 * The WASM backend is an order of magnitude faster than the plain-JS
 * CPU backend for the convolutional network used here, but it ships no
 * Conv2DBackpropFilter kernel; model.ts works around that with a
 * custom convolution gradient built from WASM-supported ops. Falls
 * back to the CPU backend when WASM is unavailable.
 */

import { createRequire } from 'node:module';
import * as path from 'node:path';
import * as tf from '@tensorflow/tfjs';

let initialized: Promise<string> | null = null;

export function initBackend(prefer: 'wasm' | 'cpu' = 'wasm'): Promise<string> {
  if (!initialized) {
    initialized = (async () => {
      if (prefer === 'wasm') {
        try {
          const wasm = await import('@tensorflow/tfjs-backend-wasm');
          const require = createRequire(import.meta.url);
          const dist = path.dirname(require.resolve('@tensorflow/tfjs-backend-wasm'));
          wasm.setWasmPaths(dist + path.sep);
          if (await tf.setBackend('wasm')) {
            await tf.ready();
            return 'wasm';
          }
        } catch {
          // fall through to cpu
        }
      }
      await tf.setBackend('cpu');
      await tf.ready();
      return 'cpu';
    })();
  }
  return initialized;
}
