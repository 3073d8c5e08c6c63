/**
 * Newline-delimited JSON client for the environment server.
 *
 * One JSON object per line in each direction; every request gets
 * exactly one response, in order, so a simple FIFO of pending promises
 * is enough. See ../PROTOCOL.md in the repository root for the full
 * message reference.
 */

import * as net from 'node:net';

export interface SpecResponse {
  kind: 'spec';
  n_lat: number;
  n_lon: number;
  n_pass: number;
  K: number;
  action_count: number;
}

export interface StepInfo {
  chosen_mesh: number | null;
  sampled_actual_cover: number | null;
  validated: boolean;
}

export interface StateResponse {
  kind: 'state';
  observation: WireObservation;
  reward: number;
  done: boolean;
  info: StepInfo | Record<string, never>;
}

export interface WireObservation {
  shape: number[];
  encoding?: 'b64f32';
  data: number[] | string;
}

export interface ErrorResponse {
  kind: 'error';
  code: string;
  message: string;
}

export type Response = SpecResponse | StateResponse | ErrorResponse | { kind: 'ok' };

export class ProtocolError extends Error {
  constructor(public code: string, message: string) {
    super(`${code}: ${message}`);
  }
}

export function decodeObservation(obs: WireObservation): Float32Array {
  if (obs.encoding === 'b64f32') {
    const raw = Buffer.from(obs.data as string, 'base64');
    // copy so the Float32Array owns little-endian-decoded memory
    const out = new Float32Array(raw.byteLength / 4);
    for (let i = 0; i < out.length; i++) out[i] = raw.readFloatLE(i * 4);
    return out;
  }
  return Float32Array.from(obs.data as number[]);
}

export class LineClient {
  private socket: net.Socket;
  private buffer = '';
  private pending: Array<{ resolve: (r: Response) => void; reject: (e: Error) => void }> = [];
  private closed = false;

  private constructor(socket: net.Socket) {
    this.socket = socket;
    socket.setEncoding('utf8');
    socket.on('data', (chunk: string) => this.onData(chunk));
    const fail = (err: Error) => {
      this.closed = true;
      while (this.pending.length) this.pending.shift()!.reject(err);
    };
    socket.on('error', fail);
    socket.on('close', () => fail(new Error('connection closed')));
  }

  static connect(host: string, port: number): Promise<LineClient> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port, noDelay: true });
      socket.once('connect', () => resolve(new LineClient(socket)));
      socket.once('error', reject);
    });
  }

  private onData(chunk: string): void {
    this.buffer += chunk;
    let idx: number;
    while ((idx = this.buffer.indexOf('\n')) >= 0) {
      const line = this.buffer.slice(0, idx);
      this.buffer = this.buffer.slice(idx + 1);
      if (!line.trim()) continue;
      const waiter = this.pending.shift();
      if (waiter) waiter.resolve(JSON.parse(line) as Response);
    }
  }

  request(message: object): Promise<Response> {
    if (this.closed) return Promise.reject(new Error('client is closed'));
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.socket.write(JSON.stringify(message) + '\n');
    });
  }

  destroy(): void {
    this.closed = true;
    this.socket.destroy();
  }
}
