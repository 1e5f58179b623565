"""Embedding archive: a text manifest followed by a raw binary payload.

Layout of the single file:

    line 1   magic `patkg-archive 1`
    line 2   manifest, one compact JSON object with sorted keys
    then     `vocab_entities` vocabulary lines (absent when 0)
    then     the parameter payload, little-endian floats

The payload holds the entity table first, then each relation's blocks in
relation order (block names sorted within a relation), every matrix
row-major. Complex-valued rows are interleaved (real, imaginary) on disk
and converted back to the in-memory parallel-halves layout on load. The
manifest pins every shape, so the payload byte length is checked exactly.

Encoding is float32 by default to halve archive size; float64 is the
bit-exact mode used by training checkpoints. A creation timestamp is
recorded only when SOURCE_DATE_EPOCH is set, so that equal inputs always
produce byte-identical archives.
"""

from __future__ import annotations

import json
import os
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import ArchiveError, FingerprintMismatch
from .graph import RelationKind, Vocabulary
from .models import ModelKind, ModelParams, is_complex, relation_block_shapes

MAGIC = "patkg-archive 1"
_ENCODINGS = {"float32": np.float32, "float64": np.float64}


def _interleave(rows: np.ndarray, dim: int) -> np.ndarray:
    """[re | im] halves -> (re0, im0, re1, im1, ...) along the last axis."""
    shape = rows.shape[:-1] + (2 * dim,)
    out = np.empty(shape, dtype=rows.dtype)
    out[..., 0::2] = rows[..., :dim]
    out[..., 1::2] = rows[..., dim:]
    return out


def _deinterleave(rows: np.ndarray, dim: int) -> np.ndarray:
    out = np.empty_like(rows)
    out[..., :dim] = rows[..., 0::2]
    out[..., dim:] = rows[..., 1::2]
    return out


def _payload_blocks(params: ModelParams) -> list[np.ndarray]:
    blocks = [params.entities]
    for rel in RelationKind:
        for name in sorted(params.relations[rel]):
            blocks.append(params.relations[rel][name])
    return blocks


def save_archive(path, params: ModelParams, vocab: Vocabulary | None = None,
                 encoding: str = "float32") -> None:
    if encoding not in _ENCODINGS:
        raise ArchiveError(f"unknown encoding {encoding!r}")
    dtype = np.dtype(_ENCODINGS[encoding]).newbyteorder("<")
    if vocab is not None and len(vocab) != params.n_entities:
        raise ArchiveError("vocabulary size does not match entity table")

    manifest = {
        "kind": params.kind.value,
        "dim": params.dim,
        "entities": params.n_entities,
        "relations": {
            rel.value: {name: list(shape) for name, shape in
                        sorted(relation_block_shapes(params.kind, params.dim).items())}
            for rel in RelationKind
        },
        "encoding": encoding,
        "vocab_sha256": params.vocab_fingerprint,
        "vocab_entities": len(vocab) if vocab is not None else 0,
    }
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        manifest["created"] = datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()

    complex_dim = params.dim if is_complex(params.kind) else None
    with open(path, "wb") as fh:
        fh.write((MAGIC + "\n").encode("utf-8"))
        fh.write((json.dumps(manifest, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8"))
        if vocab is not None:
            fh.write(("\n".join(vocab.export_lines()) + "\n").encode("utf-8"))
        for block in _payload_blocks(params):
            if complex_dim is not None and block.ndim >= 1 and block.shape[-1] == 2 * params.dim:
                block = _interleave(block, params.dim)
            fh.write(np.ascontiguousarray(block, dtype=dtype).tobytes())


def load_archive(path) -> tuple[ModelParams, Vocabulary | None]:
    """Read an archive back into (params, vocab-or-None).

    Raises ArchiveError with the offending byte offset when the payload
    does not match the manifest exactly.
    """
    raw = Path(path).read_bytes()
    nl1 = raw.find(b"\n")
    if nl1 < 0 or raw[:nl1].decode("utf-8", "replace") != MAGIC:
        raise ArchiveError(f"bad magic at byte 0 in {path}")
    nl2 = raw.find(b"\n", nl1 + 1)
    if nl2 < 0:
        raise ArchiveError(f"truncated manifest at byte {len(raw)}")
    try:
        manifest = json.loads(raw[nl1 + 1 : nl2].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ArchiveError(f"unreadable manifest at byte {nl1 + 1}: {exc}") from None

    kind = ModelKind(manifest["kind"])
    dim = int(manifest["dim"])
    n_entities = int(manifest["entities"])
    encoding = manifest["encoding"]
    if encoding not in _ENCODINGS:
        raise ArchiveError(f"unknown encoding {encoding!r}")
    dtype = np.dtype(_ENCODINGS[encoding]).newbyteorder("<")

    pos = nl2 + 1
    vocab: Vocabulary | None = None
    n_vocab = int(manifest.get("vocab_entities", 0))
    if n_vocab:
        lines = []
        for _ in range(n_vocab):
            nl = raw.find(b"\n", pos)
            if nl < 0:
                raise ArchiveError(f"truncated vocabulary at byte {pos}")
            lines.append(raw[pos:nl].decode("utf-8"))
            pos = nl + 1
        vocab = Vocabulary.from_lines(lines)
        if len(vocab) != n_entities:
            raise ArchiveError("vocabulary size does not match entity table")

    row_dim = 2 * dim if is_complex(kind) else dim
    shapes: list[tuple[int, ...]] = [(n_entities, row_dim)]
    block_names: list[tuple[RelationKind, str]] = []
    for rel in RelationKind:
        declared = manifest["relations"][rel.value]
        expected = relation_block_shapes(kind, dim)
        for name in sorted(expected):
            if tuple(declared.get(name, ())) != expected[name]:
                raise ArchiveError(f"manifest shape mismatch for {rel.value}/{name}")
            shapes.append(expected[name])
            block_names.append((rel, name))

    need = sum(int(np.prod(s)) for s in shapes) * dtype.itemsize
    if len(raw) - pos != need:
        raise ArchiveError(
            f"payload length {len(raw) - pos} != expected {need} at byte {pos}"
        )

    arrays: list[np.ndarray] = []
    for shape in shapes:
        count = int(np.prod(shape))
        nbytes = count * dtype.itemsize
        arr = np.frombuffer(raw, dtype=dtype, count=count, offset=pos).reshape(shape)
        arrays.append(arr.astype(np.float64))
        pos += nbytes

    entities = arrays[0]
    if is_complex(kind):
        entities = _deinterleave(entities, dim)
    relations: dict[RelationKind, dict[str, np.ndarray]] = {rel: {} for rel in RelationKind}
    for (rel, name), arr in zip(block_names, arrays[1:]):
        if kind is ModelKind.COMPLEX and name == "vec":
            arr = _deinterleave(arr, dim)
        relations[rel][name] = arr

    params = ModelParams(kind, dim, entities, relations, manifest["vocab_sha256"])
    return params, vocab


def check_fingerprint(params: ModelParams, vocab: Vocabulary) -> None:
    if params.vocab_fingerprint != vocab.fingerprint():
        raise FingerprintMismatch(
            "model parameters were trained against a different vocabulary"
        )
