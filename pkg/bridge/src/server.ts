import readline from "node:readline";

import type { Encoder } from "./encoder.js";

interface Request {
  id: unknown;
  text: string;
}

/**
 * Serve the embedding line protocol: announce `{"dim": N}` first, then answer
 * every `{"id", "text"}` request line with `{"id", "vector"}` (or `{"id",
 * "error"}` when encoding that text fails). Requests are encoded in batches;
 * response order is whatever the batching produces, which callers must not
 * rely on. A request line that is not JSON or lacks an id is a protocol
 * violation: the bridge reports it on stderr and exits non-zero.
 */
export async function serve(
  encoder: Encoder,
  input: NodeJS.ReadableStream,
  output: NodeJS.WritableStream,
  batchSize: number,
): Promise<number> {
  const emit = (obj: unknown) => output.write(`${JSON.stringify(obj)}\n`);
  emit({ dim: encoder.dim });

  let batch: Request[] = [];
  const flush = async () => {
    if (batch.length === 0) {
      return;
    }
    const current = batch;
    batch = [];
    try {
      const vectors = await encoder.encode(current.map((r) => r.text));
      current.forEach((r, i) => emit({ id: r.id, vector: vectors[i] }));
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      current.forEach((r) => emit({ id: r.id, error: message }));
    }
  };

  const rl = readline.createInterface({ input, crlfDelay: Infinity });
  for await (const line of rl) {
    const trimmed = line.trim();
    if (!trimmed) {
      continue;
    }
    let obj: any;
    try {
      obj = JSON.parse(trimmed);
    } catch {
      process.stderr.write(`humrank-bridge: unreadable request line: ${trimmed}\n`);
      return 1;
    }
    if (typeof obj !== "object" || obj === null || !("id" in obj)) {
      process.stderr.write(`humrank-bridge: request without id: ${trimmed}\n`);
      return 1;
    }
    if (typeof obj.text !== "string") {
      emit({ id: obj.id, error: "missing or non-string 'text'" });
      continue;
    }
    batch.push({ id: obj.id, text: obj.text });
    if (batch.length >= batchSize) {
      await flush();
    }
  }
  await flush();
  return 0;
}
