#!/usr/bin/env node
import { parseArgs } from "node:util";

import { createEncoder, type BridgeConfig } from "./encoder.js";
import { serve } from "./server.js";

const USAGE = `usage: humrank-bridge [options]

Sentence-embedding bridge speaking line-delimited JSON on stdin/stdout.
Handshake line {"dim": N} first, then one {"id", "vector"} per request.

options:
  --mode stub|model   encoder backend (default: stub)
  --dim N             vector dimension in stub mode (default: 32)
  --seed N            stub seed (default: 0)
  --model ID          transformer identifier (model mode)
  --max-length N      token truncation length (default: 256)
  --normalize         L2-normalize vectors (model mode; stub is always unit)
  --batch-size N      texts encoded per batch (default: 16)
  --help              show this message
`;

function parseConfig(argv: string[]): BridgeConfig {
  const { values } = parseArgs({
    args: argv,
    options: {
      mode: { type: "string", default: "stub" },
      dim: { type: "string", default: "32" },
      seed: { type: "string", default: "0" },
      model: { type: "string", default: "" },
      "max-length": { type: "string", default: "256" },
      normalize: { type: "boolean", default: false },
      "batch-size": { type: "string", default: "16" },
      help: { type: "boolean", default: false },
    },
  });
  if (values.help) {
    process.stdout.write(USAGE);
    process.exit(0);
  }
  const integer = (name: string, raw: string, min: number): number => {
    const value = Number.parseInt(raw, 10);
    if (!Number.isFinite(value) || value < min) {
      throw new Error(`--${name} must be an integer >= ${min}, got '${raw}'`);
    }
    return value;
  };
  const mode = values.mode as string;
  if (mode !== "stub" && mode !== "model") {
    throw new Error(`--mode must be 'stub' or 'model', got '${mode}'`);
  }
  return {
    mode,
    model: values.model as string,
    dim: integer("dim", values.dim as string, 1),
    seed: Number.parseInt(values.seed as string, 10),
    maxLength: integer("max-length", values["max-length"] as string, 1),
    normalize: values.normalize as boolean,
    batchSize: integer("batch-size", values["batch-size"] as string, 1),
  };
}

async function main(): Promise<number> {
  let config: BridgeConfig;
  try {
    config = parseConfig(process.argv.slice(2));
  } catch (err) {
    process.stderr.write(`humrank-bridge: ${err instanceof Error ? err.message : err}\n${USAGE}`);
    return 2;
  }
  try {
    const encoder = await createEncoder(config);
    return await serve(encoder, process.stdin, process.stdout, config.batchSize);
  } catch (err) {
    process.stderr.write(`humrank-bridge: ${err instanceof Error ? err.message : err}\n`);
    return 1;
  }
}

main().then((code) => {
  process.exitCode = code;
});
