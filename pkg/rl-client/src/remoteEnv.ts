/**
 * Remote environment with local reset/step semantics.
 *
 * Wraps one protocol connection; the server guarantees the trajectory
 * equals an in-process environment's bit for bit, so training code can
 * treat this exactly like a local simulator.
 */

import {
  LineClient,
  ProtocolError,
  Response,
  SpecResponse,
  StateResponse,
  StepInfo,
  decodeObservation,
} from './protocol.js';

export interface StepResult {
  observation: Float32Array;
  reward: number;
  done: boolean;
  info: StepInfo | Record<string, never>;
}

export class RemoteEnv {
  private client: LineClient;
  readonly spec: SpecResponse;

  private constructor(client: LineClient, spec: SpecResponse) {
    this.client = client;
    this.spec = spec;
  }

  static async connect(host: string, port: number): Promise<RemoteEnv> {
    const client = await LineClient.connect(host, port);
    const spec = checked(await client.request({ kind: 'hello', encoding: 'b64f32' }));
    if (spec.kind !== 'spec') throw new Error(`expected spec, got ${spec.kind}`);
    return new RemoteEnv(client, spec);
  }

  get observationShape(): [number, number, number] {
    return [this.spec.n_lat, this.spec.n_lon, this.spec.n_pass + 1];
  }

  get actionCount(): number {
    return this.spec.action_count;
  }

  async reset(seed: number, startDate?: string): Promise<Float32Array> {
    const message: Record<string, unknown> = { kind: 'reset', seed };
    if (startDate !== undefined) message.start_date = startDate;
    const state = expectState(checked(await this.client.request(message)));
    return decodeObservation(state.observation);
  }

  async step(action: number): Promise<StepResult> {
    const state = expectState(checked(await this.client.request({ kind: 'step', action })));
    return {
      observation: decodeObservation(state.observation),
      reward: state.reward,
      done: state.done,
      info: state.info,
    };
  }

  async close(): Promise<void> {
    try {
      await this.client.request({ kind: 'close' });
    } catch {
      // server may already be gone; closing is best-effort
    }
    this.client.destroy();
  }
}

function checked(response: Response): Response {
  if (response.kind === 'error') throw new ProtocolError(response.code, response.message);
  return response;
}

function expectState(response: Response): StateResponse {
  if (response.kind !== 'state') throw new Error(`expected state, got ${response.kind}`);
  return response;
}
