"""Deterministic stand-in for an encoder bridge.

Speaks the embedding line protocol on stdin/stdout and returns pseudo-random
unit vectors derived purely from (seed, dim, truncated text) through SHA-256,
so the same text yields the same vector on any machine and in any language
runtime that follows the recipe below. Lets the whole pipeline run and be
tested without model downloads.

Vector recipe (fixed, shared with other bridge implementations):
  1. tokens  = whitespace-split(text); keep the first max_length tokens
  2. key     = "{seed}|{dim}|" + tokens joined by single spaces, as UTF-8
  3. block i = sha256(key + "|" + str(i)), each block giving eight
     big-endian uint32 words w -> component (w / 2^32) * 2 - 1
  4. collect dim components, then divide by their Euclidean norm
     (left-to-right summation; an all-zero vector falls back to e1)
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

DEFAULT_DIM = 32
DEFAULT_MAX_LENGTH = 256


def stub_vector(text: str, dim: int, seed: int, max_length: int = DEFAULT_MAX_LENGTH) -> list[float]:
    """Unit vector deterministically keyed by the truncated text."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    tokens = text.split()[:max_length]
    key = f"{seed}|{dim}|{' '.join(tokens)}".encode("utf-8")
    components: list[float] = []
    block = 0
    while len(components) < dim:
        digest = hashlib.sha256(key + b"|" + str(block).encode("ascii")).digest()
        for off in range(0, 32, 4):
            if len(components) == dim:
                break
            word = int.from_bytes(digest[off : off + 4], "big")
            components.append((word / 4294967296.0) * 2.0 - 1.0)
        block += 1
    total = 0.0
    for c in components:
        total += c * c
    norm = math.sqrt(total)
    if norm == 0.0:
        components[0] = 1.0
        norm = 1.0
    return [c / norm for c in components]


def serve(stdin, stdout, dim: int, seed: int, max_length: int) -> int:
    stdout.write(json.dumps({"dim": dim}) + "\n")
    stdout.flush()
    for raw in stdin:
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            print(f"stub-bridge: unreadable request line: {exc}", file=sys.stderr)
            return 1
        if not isinstance(obj, dict) or "id" not in obj:
            print(f"stub-bridge: request without id: {line!r}", file=sys.stderr)
            return 1
        rid = obj["id"]
        text = obj.get("text")
        if not isinstance(text, str):
            stdout.write(json.dumps({"id": rid, "error": "missing or non-string 'text'"}) + "\n")
        else:
            vec = stub_vector(text, dim, seed, max_length)
            stdout.write(json.dumps({"id": rid, "vector": vec}) + "\n")
        stdout.flush()
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="humrank-stub-bridge",
        description="deterministic hash-based embedding bridge (line protocol on stdin/stdout)",
    )
    parser.add_argument("--dim", type=int, default=DEFAULT_DIM)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-length", type=int, default=DEFAULT_MAX_LENGTH)
    args = parser.parse_args(argv)
    if args.dim < 1 or args.max_length < 1:
        parser.error("--dim and --max-length must be >= 1")
    return serve(sys.stdin, sys.stdout, args.dim, args.seed, args.max_length)


if __name__ == "__main__":
    sys.exit(main())
