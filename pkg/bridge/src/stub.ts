import { createHash } from "node:crypto";

/**
 * Deterministic pseudo-random unit vector keyed by (seed, dim, truncated text).
 *
 * The recipe is a cross-implementation contract (the Python toolkit ships the
 * same one), so equal inputs produce bit-equal float64 components everywhere:
 *   1. tokens  = whitespace-split(text), first maxLength tokens kept
 *   2. key     = "<seed>|<dim>|" + tokens joined by single spaces (UTF-8)
 *   3. block i = sha256(key + "|" + i); each 4 bytes big-endian -> uint32 w,
 *      component (w / 2^32) * 2 - 1
 *   4. take dim components and divide by their Euclidean norm, summing
 *      left to right (an all-zero vector falls back to e1)
 */
export function stubVector(text: string, dim: number, seed: number, maxLength = 256): number[] {
  if (dim < 1) {
    throw new Error(`dim must be >= 1, got ${dim}`);
  }
  const tokens = text
    .split(/\s+/u)
    .filter((t) => t.length > 0)
    .slice(0, maxLength);
  const key = Buffer.from(`${seed}|${dim}|${tokens.join(" ")}`, "utf8");
  const components: number[] = [];
  let block = 0;
  while (components.length < dim) {
    const digest = createHash("sha256")
      .update(key)
      .update(Buffer.from(`|${block}`, "ascii"))
      .digest();
    for (let off = 0; off < 32 && components.length < dim; off += 4) {
      const word = digest.readUInt32BE(off);
      components.push((word / 4294967296) * 2 - 1);
    }
    block += 1;
  }
  let total = 0;
  for (const c of components) {
    total += c * c;
  }
  let norm = Math.sqrt(total);
  if (norm === 0) {
    components[0] = 1;
    norm = 1;
  }
  return components.map((c) => c / norm);
}
