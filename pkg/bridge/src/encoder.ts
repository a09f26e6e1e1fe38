import { stubVector } from "./stub.js";

export interface BridgeConfig {
  mode: "stub" | "model";
  model: string;
  dim: number;
  seed: number;
  maxLength: number;
  normalize: boolean;
  batchSize: number;
}

export interface Encoder {
  readonly dim: number;
  encode(texts: string[]): Promise<number[][]>;
}

function l2Normalize(vector: number[]): number[] {
  let total = 0;
  for (const v of vector) {
    total += v * v;
  }
  const norm = Math.sqrt(total);
  if (norm === 0) {
    throw new Error("cannot normalize a zero vector");
  }
  return vector.map((v) => v / norm);
}

export class StubEncoder implements Encoder {
  constructor(
    readonly dim: number,
    private readonly seed: number,
    private readonly maxLength: number,
  ) {}

  // stub vectors are unit norm by construction, so `normalize` is a no-op
  async encode(texts: string[]): Promise<number[][]> {
    return texts.map((text) => stubVector(text, this.dim, this.seed, this.maxLength));
  }
}

/**
 * Transformer-backed encoder: final-layer hidden state of the first special
 * token, inputs truncated to maxLength tokens. Requires the optional
 * `@xenova/transformers` package (and local or downloadable model weights),
 * which is why it is loaded dynamically; stub mode covers protocol tests.
 */
export async function createModelEncoder(
  model: string,
  maxLength: number,
  normalize: boolean,
): Promise<Encoder> {
  let transformers: any;
  try {
    // optional dependency; the variable specifier keeps tsc from resolving it
    const specifier = "@xenova/transformers";
    transformers = await import(specifier);
  } catch {
    throw new Error(
      "model mode needs the optional '@xenova/transformers' package; " +
        "install it (npm install @xenova/transformers) or use --mode stub",
    );
  }
  const extractor = await transformers.pipeline("feature-extraction", model);

  const firstToken = async (text: string): Promise<number[]> => {
    const features = await extractor(text, {
      pooling: "none",
      truncation: true,
      max_length: maxLength,
    });
    const hidden = features.dims[features.dims.length - 1];
    const vector = Array.from(features.data.slice(0, hidden), Number);
    return normalize ? l2Normalize(vector) : vector;
  };

  const probe = await firstToken("");
  return {
    dim: probe.length,
    async encode(texts: string[]): Promise<number[][]> {
      const out: number[][] = [];
      for (const text of texts) {
        out.push(await firstToken(text));
      }
      return out;
    },
  };
}

export async function createEncoder(config: BridgeConfig): Promise<Encoder> {
  if (config.mode === "stub") {
    return new StubEncoder(config.dim, config.seed, config.maxLength);
  }
  if (!config.model) {
    throw new Error("--mode model needs --model <identifier>");
  }
  return createModelEncoder(config.model, config.maxLength, config.normalize);
}
