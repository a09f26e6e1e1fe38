"""Line-delimited JSON transport to encoder-bridge and scorer child processes.

Protocol (one JSON object per line, UTF-8):
  * embedding bridge: the child first announces ``{"dim": N}``, then answers
    each ``{"id", "text"}`` request with ``{"id", "vector"}``.
  * scorer: answers each ``{"id", "query", "doc"}`` request with
    ``{"id", "score"}``.

Responses may arrive in any order; every request must be answered exactly
once. A response carrying an ``error`` field, a malformed line, a dropped
request, or a timeout is a hard BridgeError naming the offending id.
"""

from __future__ import annotations

import json
import math
import queue
import shlex
import subprocess
import threading
from typing import Iterable, Mapping, Sequence

from humrank.errors import BridgeError

DEFAULT_TIMEOUT = 120.0


def _as_argv(cmd: str | Sequence[str]) -> list[str]:
    if isinstance(cmd, str):
        return shlex.split(cmd)
    return list(cmd)


class _LineBatch:
    """Spawn a child, stream request lines in, collect response lines out.

    stdin is fed from a writer thread (and closed when done) so a child that
    answers lazily or eagerly can never deadlock against a full pipe; stderr
    is drained to a bounded buffer used in error messages.
    """

    def __init__(self, cmd: str | Sequence[str], timeout: float = DEFAULT_TIMEOUT):
        self.argv = _as_argv(cmd)
        self.timeout = timeout
        self._stderr_tail: list[str] = []

    def _fail(self, proc: subprocess.Popen, message: str) -> BridgeError:
        proc.kill()
        proc.wait()
        tail = "".join(self._stderr_tail[-10:]).strip()
        if tail:
            message = f"{message} (child stderr: {tail!r})"
        return BridgeError(message)

    def run(self, requests: Iterable[dict]) -> Iterable[dict]:
        """Yield parsed response objects until the child closes stdout."""
        try:
            proc = subprocess.Popen(
                self.argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise BridgeError(f"cannot spawn {self.argv!r}: {exc}") from exc

        def feed() -> None:
            try:
                for req in requests:
                    proc.stdin.write(json.dumps(req, ensure_ascii=False) + "\n")
                proc.stdin.close()
            except (BrokenPipeError, ValueError, OSError):
                pass  # child died; the reader reports the failure

        def drain_stderr() -> None:
            try:
                for line in proc.stderr:
                    self._stderr_tail.append(line)
                    del self._stderr_tail[:-50]
            except (ValueError, OSError):
                pass

        out: queue.Queue = queue.Queue()

        def pump_stdout() -> None:
            try:
                for line in proc.stdout:
                    out.put(line)
            except (ValueError, OSError):
                pass
            out.put(None)

        threads = [
            threading.Thread(target=feed, daemon=True),
            threading.Thread(target=drain_stderr, daemon=True),
            threading.Thread(target=pump_stdout, daemon=True),
        ]
        for t in threads:
            t.start()
        try:
            while True:
                try:
                    line = out.get(timeout=self.timeout)
                except queue.Empty:
                    raise self._fail(proc, f"timed out after {self.timeout}s waiting for {self.argv[0]}")
                if line is None:
                    break
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise self._fail(proc, f"malformed response line {line!r}: {exc}")
                if not isinstance(obj, dict):
                    raise self._fail(proc, f"response is not an object: {line!r}")
                yield obj
        finally:
            proc.kill()
            proc.wait()


class ProcessEncoder:
    """Embedding-bridge client over the line protocol."""

    def __init__(self, cmd: str | Sequence[str], timeout: float = DEFAULT_TIMEOUT):
        self.cmd = cmd
        self.timeout = timeout

    def encode(self, items: Sequence[tuple[str, str]]) -> tuple[int, dict[str, list[float]]]:
        """Encode (id, text) pairs; returns (dim, id -> vector).

        Enforces the handshake, constant dimension, and exactly-once answers.
        """
        ids = [i for i, _ in items]
        if len(set(ids)) != len(ids):
            raise BridgeError("duplicate ids in encode request batch")
        pending = set(ids)
        vectors: dict[str, list[float]] = {}
        dim: int | None = None
        batch = _LineBatch(self.cmd, self.timeout)
        requests = ({"id": i, "text": t} for i, t in items)
        for obj in batch.run(requests):
            if dim is None:
                if "dim" not in obj:
                    raise BridgeError(f"bridge must announce {{'dim': N}} before responses, got {obj!r}")
                dim = int(obj["dim"])
                if dim < 1:
                    raise BridgeError(f"bridge announced invalid dim {dim}")
                continue
            rid = obj.get("id")
            if obj.get("error") is not None:
                raise BridgeError(f"bridge failed on id {rid!r}: {obj['error']}")
            if rid not in pending:
                raise BridgeError(f"bridge answered unknown or duplicate id {rid!r}")
            vec = obj.get("vector")
            if not isinstance(vec, list) or len(vec) != dim:
                got = len(vec) if isinstance(vec, list) else type(vec).__name__
                raise BridgeError(f"bridge returned wrong dim for id {rid!r}: got {got}, expected {dim}")
            values = [float(x) for x in vec]
            if not all(math.isfinite(x) for x in values):
                raise BridgeError(f"bridge returned non-finite values for id {rid!r}")
            vectors[rid] = values
            pending.discard(rid)
        if items and dim is None:
            raise BridgeError("bridge exited without a handshake")
        if pending:
            missing = sorted(pending)[:5]
            raise BridgeError(f"bridge exited with {len(pending)} unanswered ids, e.g. {missing}")
        return (dim if dim is not None else 0), vectors


class ProcessScorer:
    """Scorer client over the line protocol; usable wherever a plain
    callable from requests to {pair_id: score} is expected."""

    def __init__(self, cmd: str | Sequence[str], timeout: float = DEFAULT_TIMEOUT):
        self.cmd = cmd
        self.timeout = timeout

    def __call__(self, requests: Sequence[tuple[str, str, str]]) -> Mapping[str, float]:
        """Score (pair_id, query_text, doc_text) triples."""
        ids = [r[0] for r in requests]
        if len(set(ids)) != len(ids):
            raise BridgeError("duplicate pair_ids in scorer batch")
        pending = set(ids)
        scores: dict[str, float] = {}
        batch = _LineBatch(self.cmd, self.timeout)
        lines = ({"id": i, "query": q, "doc": d} for i, q, d in requests)
        for obj in batch.run(lines):
            rid = obj.get("id")
            if obj.get("error") is not None:
                raise BridgeError(f"scorer failed on pair_id {rid!r}: {obj['error']}")
            if rid not in pending:
                raise BridgeError(f"scorer answered unknown or duplicate pair_id {rid!r}")
            try:
                score = float(obj["score"])
            except (KeyError, TypeError, ValueError):
                raise BridgeError(f"scorer response for pair_id {rid!r} has no numeric 'score'") from None
            if not math.isfinite(score):
                raise BridgeError(f"scorer returned non-finite score for pair_id {rid!r}")
            scores[rid] = score
            pending.discard(rid)
        if pending:
            missing = sorted(pending)[:5]
            raise BridgeError(f"scorer exited with {len(pending)} unanswered pair_ids, e.g. {missing}")
        return scores
