"""Flat binary embedding store with an id manifest.

Layout on disk (one directory per store):
  * ``manifest.json``: dim, count, dtype ("f32le"), ids (array), normalized,
    metadata (free-form string map, e.g. encoder name / truncation length /
    pooling mode).
  * ``vectors.bin``: raw little-endian float32, row-major, no header.

The binary layout is a compatibility contract: whatever produced the vectors,
``open_store`` serves them back bit-exactly through a read-only memory map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from humrank.errors import DataError

MANIFEST_NAME = "manifest.json"
VECTORS_NAME = "vectors.bin"
DTYPE = "f32le"

# How far a row norm may drift from 1.0 and still count as normalized.
NORM_TOLERANCE = 1e-4


@dataclass
class EmbeddingManifest:
    dim: int
    count: int
    ids: list[str]
    normalized: bool = False
    dtype: str = DTYPE
    metadata: dict[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        if self.dim < 1:
            raise DataError(f"manifest dim must be >= 1, got {self.dim}")
        if self.count < 0:
            raise DataError(f"manifest count must be >= 0, got {self.count}")
        if self.dtype != DTYPE:
            raise DataError(f"unsupported dtype {self.dtype!r}, only {DTYPE!r} is defined")
        if len(self.ids) != self.count:
            raise DataError(f"manifest lists {len(self.ids)} ids but count={self.count}")
        if len(set(self.ids)) != len(self.ids):
            raise DataError("manifest ids are not unique")

    def to_json(self) -> str:
        obj = {
            "dim": self.dim,
            "count": self.count,
            "dtype": self.dtype,
            "ids": self.ids,
            "normalized": self.normalized,
            "metadata": self.metadata,
        }
        return json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "EmbeddingManifest":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid manifest JSON: {exc}") from exc
        try:
            manifest = cls(
                dim=int(obj["dim"]),
                count=int(obj["count"]),
                ids=[str(i) for i in obj["ids"]],
                normalized=bool(obj["normalized"]),
                dtype=str(obj["dtype"]),
                metadata={str(k): str(v) for k, v in obj.get("metadata", {}).items()},
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"manifest is missing or has malformed fields: {exc}") from exc
        manifest.validate()
        return manifest


class EmbeddingMatrix:
    """Read-only count x dim float32 matrix with O(1) row lookup by id."""

    def __init__(self, manifest: EmbeddingManifest, data: np.ndarray):
        manifest.validate()
        if data.shape != (manifest.count, manifest.dim) and manifest.count > 0:
            raise DataError(
                f"data shape {data.shape} does not match manifest "
                f"({manifest.count} x {manifest.dim})"
            )
        self.manifest = manifest
        self.data = data
        self._row_of = {doc_id: row for row, doc_id in enumerate(manifest.ids)}
        self._tie_ranks: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.manifest.dim

    @property
    def count(self) -> int:
        return self.manifest.count

    @property
    def ids(self) -> list[str]:
        return self.manifest.ids

    def row_of(self, vec_id: str) -> int:
        try:
            return self._row_of[vec_id]
        except KeyError:
            raise DataError(f"id {vec_id!r} not found in store") from None

    def vector(self, vec_id: str) -> np.ndarray:
        return self.data[self.row_of(vec_id)]

    def tie_ranks(self) -> np.ndarray:
        """Rank of each row under ascending id order (codepoint comparison).

        Used as the deterministic tie-breaker when scores are equal.
        """
        if self._tie_ranks is None:
            order = sorted(range(self.count), key=self.ids.__getitem__)
            ranks = np.empty(self.count, dtype=np.int64)
            for pos, row in enumerate(order):
                ranks[row] = pos
            self._tie_ranks = ranks
        return self._tie_ranks


def write_store(
    vectors: Iterable[tuple[str, Sequence[float] | np.ndarray]],
    directory: str | Path,
    normalized: bool = False,
    metadata: dict[str, str] | None = None,
) -> EmbeddingManifest:
    """Write (id, vector) pairs to ``directory`` and return the manifest.

    All vectors must share one dimension and ids must be unique; rows are
    written in input order. With ``normalized=True`` every row must already
    have unit Euclidean norm (within 1e-4).
    """
    ids: list[str] = []
    rows: list[np.ndarray] = []
    dim: int | None = None
    for vec_id, vec in vectors:
        arr = np.asarray(vec, dtype=np.float32)
        if arr.ndim != 1:
            raise DataError(f"vector for id {vec_id!r} is not 1-dimensional")
        if dim is None:
            dim = int(arr.shape[0])
            if dim < 1:
                raise DataError(f"vector for id {vec_id!r} is empty")
        elif arr.shape[0] != dim:
            raise DataError(
                f"dimension mismatch for id {vec_id!r}: got {arr.shape[0]}, expected {dim}"
            )
        ids.append(vec_id)
        rows.append(arr)
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise DataError(f"duplicate ids in store input: {dupes[:5]}")

    count = len(rows)
    if dim is None:
        dim = 1  # empty store still needs a valid manifest
    data = np.vstack(rows) if rows else np.zeros((0, dim), dtype=np.float32)

    if normalized:
        norms = np.linalg.norm(data.astype(np.float64), axis=1) if count else np.array([])
        bad = np.nonzero(np.abs(norms - 1.0) > NORM_TOLERANCE)[0]
        if bad.size:
            raise DataError(
                f"normalized=True but row for id {ids[int(bad[0])]!r} has norm {norms[int(bad[0])]:.6g}"
            )

    manifest = EmbeddingManifest(
        dim=dim,
        count=count,
        ids=ids,
        normalized=normalized,
        metadata=dict(metadata or {}),
    )
    manifest.validate()

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / VECTORS_NAME, "wb") as fh:
        fh.write(data.astype("<f4", copy=False).tobytes(order="C"))
    (directory / MANIFEST_NAME).write_text(manifest.to_json() + "\n", encoding="utf-8")
    return manifest


def open_store(directory: str | Path) -> EmbeddingMatrix:
    """Open a store as a read-only, memory-mapped matrix.

    Checks that the binary file size matches the manifest exactly; lookups
    by id are O(1) via a table built here.
    """
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    vectors_path = directory / VECTORS_NAME
    if not manifest_path.is_file():
        raise DataError(f"missing {manifest_path}")
    if not vectors_path.is_file():
        raise DataError(f"missing {vectors_path}")
    manifest = EmbeddingManifest.from_json(manifest_path.read_text(encoding="utf-8"))
    expected = manifest.count * manifest.dim * 4
    actual = vectors_path.stat().st_size
    if actual != expected:
        raise DataError(
            f"{vectors_path}: expected {expected} bytes "
            f"({manifest.count} x {manifest.dim} x 4), found {actual}"
        )
    if manifest.count == 0:
        data = np.zeros((0, manifest.dim), dtype=np.float32)
    else:
        data = np.memmap(vectors_path, dtype="<f4", mode="r", shape=(manifest.count, manifest.dim))
    return EmbeddingMatrix(manifest, data)


def normalize_rows(matrix: EmbeddingMatrix) -> EmbeddingMatrix:
    """Return a copy of the matrix with unit-norm rows (norms taken in f64).

    A zero-norm row is an error naming the offending id.
    """
    data64 = np.asarray(matrix.data, dtype=np.float64)
    norms = np.linalg.norm(data64, axis=1)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise DataError(f"cannot normalize zero vector for id {matrix.ids[int(zero[0])]!r}")
    normalized = (data64 / norms[:, None]).astype(np.float32) if matrix.count else matrix.data
    manifest = EmbeddingManifest(
        dim=matrix.dim,
        count=matrix.count,
        ids=list(matrix.ids),
        normalized=True,
        metadata=dict(matrix.manifest.metadata),
    )
    return EmbeddingMatrix(manifest, np.ascontiguousarray(normalized, dtype=np.float32))
