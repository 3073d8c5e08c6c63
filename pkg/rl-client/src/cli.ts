/** CLI: train an agent against running servers, evaluate a checkpoint. */

import * as fs from 'node:fs';
import * as path from 'node:path';
import { parseArgs } from 'node:util';
import { trainA2C } from './a2c.js';
import { initBackend } from './backend.js';
import { episodeSpecs, evaluatePolicy, meanLength, rowsToCsv } from './evaluate.js';
import { PolicyValueNet } from './model.js';
import { RemoteEnv } from './remoteEnv.js';

function splitHostPort(value: string): [string, number] {
  const idx = value.lastIndexOf(':');
  return [value.slice(0, idx) || '127.0.0.1', Number(value.slice(idx + 1))];
}

async function cmdTrain(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      servers: { type: 'string' },
      steps: { type: 'string', default: '200000' },
      out: { type: 'string' },
      'n-steps': { type: 'string', default: '5' },
      lr: { type: 'string', default: '0.0007' },
      gamma: { type: 'string', default: '0.99' },
      'entropy-coef': { type: 'string', default: '0.01' },
      'value-coef': { type: 'string', default: '0.5' },
      'max-grad-norm': { type: 'string', default: '0.5' },
      seed: { type: 'string', default: '0' },
      'start-dates': { type: 'string', default: '' },
      resume: { type: 'string' },
      'log-every': { type: 'string', default: '50' },
    },
  });
  if (!values.servers || !values.out) {
    console.error('usage: train --servers host:port,... --steps N --out dir/');
    return 2;
  }
  console.log(`backend: ${await initBackend()}`);
  const envs = await Promise.all(
    values.servers.split(',').map((s) => {
      const [host, port] = splitHostPort(s.trim());
      return RemoteEnv.connect(host, port);
    }),
  );
  const spec = envs[0].spec;
  const net = values.resume
    ? PolicyValueNet.load(values.resume).net
    : new PolicyValueNet(
        {
          nLat: spec.n_lat,
          nLon: spec.n_lon,
          depth: spec.n_pass + 1,
          actionCount: spec.action_count,
        },
        Number(values.seed) + 1,
      );
  const result = await trainA2C(envs, net, {
    steps: Number(values.steps),
    nSteps: Number(values['n-steps']),
    gamma: Number(values.gamma),
    lr: Number(values.lr),
    entropyCoef: Number(values['entropy-coef']),
    valueCoef: Number(values['value-coef']),
    maxGradNorm: Number(values['max-grad-norm']),
    seed: Number(values.seed),
    startDates: values['start-dates'] ? values['start-dates'].split(',') : [],
    logEvery: Number(values['log-every']),
    outDir: values.out,
    checkpointEvery: 200,
  });
  console.log(
    `done: ${result.envSteps} env steps, ${result.updates} updates, ` +
      `${result.episodeLengths.length} episodes; checkpoint + curve in ${values.out}`,
  );
  await Promise.all(envs.map((e) => e.close()));
  return 0;
}

async function cmdEval(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      server: { type: 'string' },
      ckpt: { type: 'string' },
      episodes: { type: 'string', default: '50' },
      out: { type: 'string' },
      gamma: { type: 'string', default: '0.99' },
      mode: { type: 'string', default: 'greedy' },
      seed: { type: 'string', default: '0' },
      dates: { type: 'string', default: '' },
      'weather-seeds': { type: 'string', default: '1' },
      name: { type: 'string', default: 'a2c' },
    },
  });
  if (!values.server || !values.ckpt || !values.out) {
    console.error('usage: eval --server host:port --ckpt file --episodes N --out csv');
    return 2;
  }
  console.log(`backend: ${await initBackend()}`);
  const [host, port] = splitHostPort(values.server);
  const env = await RemoteEnv.connect(host, port);
  const { net } = PolicyValueNet.load(values.ckpt);
  const dates = values.dates ? values.dates.split(',') : [undefined];
  const weatherSeeds = values['weather-seeds'].split(',').map(Number);
  const specs = episodeSpecs(values.name, Number(values.seed), dates, weatherSeeds).slice(
    0,
    Number(values.episodes),
  );
  const rows = await evaluatePolicy(env, net, specs, {
    agentName: values.name,
    gamma: Number(values.gamma),
    mode: values.mode as 'greedy' | 'sample',
  });
  fs.mkdirSync(path.dirname(path.resolve(values.out)), { recursive: true });
  fs.writeFileSync(values.out, rowsToCsv(rows));
  console.log(`${rows.length} episodes, mean length ${meanLength(rows).toFixed(1)} -> ${values.out}`);
  await env.close();
  return 0;
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  if (command === 'train') return cmdTrain(rest);
  if (command === 'eval') return cmdEval(rest);
  console.error('usage: cli.js <train|eval> ...');
  return 2;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(err);
    process.exit(1);
  },
);
