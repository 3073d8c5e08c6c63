/** Shared test plumbing: spawn the Python env server, run benchmarks. */

import { ChildProcess, spawn } from 'node:child_process';
import * as fs from 'node:fs';
import * as path from 'node:path';
import { fileURLToPath } from 'node:url';

export const REPO_ROOT = path.resolve(path.dirname(fileURLToPath(import.meta.url)), '../..');
export const TINY_CONFIG = path.join(REPO_ROOT, 'configs', 'tiny.json');

export interface ServerHandle {
  proc: ChildProcess;
  host: string;
  port: number;
  stop: () => void;
}

export function startServer(config: string = TINY_CONFIG): Promise<ServerHandle> {
  return new Promise((resolve, reject) => {
    const proc = spawn(
      'python3',
      ['-m', 'eosched', 'serve', '--config', config, '--listen', '127.0.0.1:0'],
      { cwd: REPO_ROOT, stdio: ['ignore', 'pipe', 'pipe'] },
    );
    let buffer = '';
    let stderr = '';
    const timer = setTimeout(() => {
      proc.kill();
      reject(new Error(`server did not come up: ${stderr}`));
    }, 60_000);
    proc.stderr!.on('data', (chunk) => (stderr += chunk));
    proc.stdout!.on('data', (chunk) => {
      buffer += chunk;
      const match = buffer.match(/listening on ([\d.]+):(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve({
          proc,
          host: match[1],
          port: Number(match[2]),
          stop: () => proc.kill(),
        });
      }
    });
    proc.once('exit', (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early (${code}): ${stderr}`));
    });
  });
}

export function runPython(args: string[]): Promise<string> {
  return new Promise((resolve, reject) => {
    const proc = spawn('python3', args, { cwd: REPO_ROOT, stdio: ['ignore', 'pipe', 'pipe'] });
    let out = '';
    let err = '';
    proc.stdout!.on('data', (c) => (out += c));
    proc.stderr!.on('data', (c) => (err += c));
    proc.once('exit', (code) =>
      code === 0 ? resolve(out) : reject(new Error(`python ${args[0]} failed (${code}): ${err}`)),
    );
  });
}

export interface BenchBaselines {
  randomMean: number;
  heuristicMean: number;
  pairs: Array<{ date: string; weatherSeed: number }>;
  episodesCsv: string;
}

/** Run the harness benchmark for the reference agents and parse it. */
export async function runBaselines(outDir: string, episodes: number, seeds: string): Promise<BenchBaselines> {
  await runPython([
    '-m', 'eosched', 'bench',
    '--config', TINY_CONFIG,
    '--agents', 'random,heuristic',
    '--episodes', String(episodes),
    '--seeds', seeds,
    '--out', outDir,
  ]);
  const summary = JSON.parse(fs.readFileSync(path.join(outDir, 'summary.json'), 'utf8'));
  const csvPath = path.join(outDir, 'episodes.csv');
  const lines = fs.readFileSync(csvPath, 'utf8').trim().split('\n');
  const header = lines[0].split(',');
  const dateCol = header.indexOf('start_date');
  const wsCol = header.indexOf('weather_seed');
  const agentCol = header.indexOf('agent_name');
  const pairs: Array<{ date: string; weatherSeed: number }> = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(',');
    if (cells[agentCol] !== 'random') continue; // one agent's rows = the unique grid
    pairs.push({ date: cells[dateCol], weatherSeed: Number(cells[wsCol]) });
  }
  return {
    randomMean: summary.per_agent.random.mean,
    heuristicMean: summary.per_agent.heuristic.mean,
    pairs,
    episodesCsv: csvPath,
  };
}
