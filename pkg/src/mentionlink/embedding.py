"""Mean pooling, unit normalization, and the encoder backends.

Embeddings travel as float64 numpy arrays; a corpus is an ``(n, dim)`` matrix
whose rows are unit norm. A row of NaN marks a mention whose vector came out
degenerate; downstream stages route those mentions to "unmatched".
"""

from __future__ import annotations

import hashlib
import json
import logging
import shlex
import subprocess
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .context import ContextString
from .errors import ConfigError, ContractError, DegenerateVectorError, StageError

logger = logging.getLogger(__name__)

NORM_FLOOR = 1e-12
PAD = "\x03"


def mean_pool(rows, mask) -> np.ndarray:
    """Attention-mask-weighted average of token vectors (not normalized)."""
    rows = np.asarray(rows, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if rows.ndim != 2 or mask.shape != (rows.shape[0],):
        raise ContractError("mean_pool expects an (n, D) matrix and an n-vector mask")
    total = mask.sum()
    if total <= 0:
        raise ContractError("mean_pool: attention mask is all zero")
    return (mask @ rows) / total


def l2_normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if not norm > NORM_FLOOR:
        raise DegenerateVectorError(f"vector norm {norm:g} is too small to normalize")
    return v / norm


def is_degenerate(matrix: np.ndarray) -> np.ndarray:
    """Boolean mask of rows flagged as degenerate (non-finite)."""
    return ~np.isfinite(matrix).all(axis=1)


def _trigrams(text: str) -> list[str]:
    if len(text) < 3:
        text = text + PAD * (3 - len(text))
    return [text[i : i + 3] for i in range(len(text) - 2)]


def _hash64(gram: str) -> int:
    return int.from_bytes(hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest(), "little")


def reference_encode(text: str | ContextString, dim: int) -> np.ndarray:
    """Signed feature hashing of character 3-grams, then L2 normalization.

    Each 3-gram hashes (64-bit BLAKE2b, no seed) to bucket ``h % dim`` and adds
    -1 there when the top bit of ``h`` is set, +1 otherwise.
    """
    if dim < 1:
        raise ConfigError("dim must be >= 1")
    if isinstance(text, ContextString):
        text = text.value
    hashes = [_hash64(g) for g in _trigrams(text)]
    pos = np.fromiter((h % dim for h in hashes), dtype=np.int64, count=len(hashes))
    sign = np.fromiter((-1.0 if h >> 63 else 1.0 for h in hashes), dtype=np.float64, count=len(hashes))
    return l2_normalize(np.bincount(pos, weights=sign, minlength=dim))


@runtime_checkable
class EncoderBackend(Protocol):
    name: str
    dim: int
    thread_safe: bool

    def encode_batch(self, texts: Sequence[str]) -> np.ndarray: ...


class ReferenceEncoder:
    """Deterministic, dependency-free stand-in for a sentence encoder."""

    name = "reference"
    thread_safe = True

    def __init__(self, dim: int = 384):
        if dim < 1:
            raise ConfigError("dim must be >= 1")
        self.dim = dim

    def encode_batch(self, texts: Sequence[str]) -> np.ndarray:
        out = np.empty((len(texts), self.dim))
        for i, text in enumerate(texts):
            try:
                out[i] = reference_encode(text, self.dim)
            except DegenerateVectorError:
                out[i] = np.nan
        return out


class ExternalEncoder:
    """Line protocol adapter around an encoder child process.

    Handshake: we send ``DIM <d>``, the child must answer ``DIM <d>``. Then,
    per text, we send one JSON string literal per line and read back one line
    of ``d`` whitespace-separated floats, which we L2-normalize.
    """

    thread_safe = False

    def __init__(self, command: str | Sequence[str], dim: int = 384):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.dim = dim
        self.name = f"external:{' '.join(self.command)}"
        self._proc: subprocess.Popen | None = None

    def _start(self) -> subprocess.Popen:
        if self._proc is not None and self._proc.poll() is None:
            return self._proc
        proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            encoding="utf-8",
            bufsize=1,
        )
        proc.stdin.write(f"DIM {self.dim}\n")
        proc.stdin.flush()
        reply = proc.stdout.readline().split()
        if reply != ["DIM", str(self.dim)]:
            proc.kill()
            proc.wait()
            raise ConfigError(
                f"external encoder handshake failed: expected 'DIM {self.dim}', got {' '.join(reply)!r}"
            )
        self._proc = proc
        return proc

    def encode_batch(self, texts: Sequence[str]) -> np.ndarray:
        proc = self._start()
        out = np.empty((len(texts), self.dim))
        for i, text in enumerate(texts):
            proc.stdin.write(json.dumps(text) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
            if not line:
                raise RuntimeError("external encoder closed its output")
            values = line.split()
            if len(values) != self.dim:
                raise RuntimeError(f"expected {self.dim} floats, got {len(values)}")
            try:
                out[i] = l2_normalize(np.array(values, dtype=np.float64))
            except DegenerateVectorError:
                out[i] = np.nan
        return out

    def close(self) -> None:
        if self._proc is not None:
            if self._proc.stdin:
                self._proc.stdin.close()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def make_encoder(spec: str, dim: int) -> EncoderBackend:
    """``reference`` or ``external:<command>``."""
    if spec == "reference":
        return ReferenceEncoder(dim)
    if spec.startswith("external:"):
        return ExternalEncoder(spec[len("external:") :], dim)
    raise ConfigError(f"unknown encoder {spec!r}")


def encode_corpus(
    backend: EncoderBackend,
    contexts: Sequence[ContextString | str],
    batch_size: int = 256,
    dim: int | None = None,
) -> np.ndarray:
    if dim is not None and backend.dim != dim:
        raise ConfigError(f"encoder {backend.name} produces dim {backend.dim}, config wants {dim}")
    if batch_size < 1:
        raise ConfigError("batch_size must be >= 1")
    texts = [c.value if isinstance(c, ContextString) else c for c in contexts]
    out = np.empty((len(texts), backend.dim))
    for b, start in enumerate(range(0, len(texts), batch_size)):
        chunk = texts[start : start + batch_size]
        try:
            vecs = np.asarray(backend.encode_batch(chunk), dtype=np.float64)
        except Exception as exc:
            raise StageError("embed", f"batch {b}: {exc}") from exc
        if vecs.shape != (len(chunk), backend.dim):
            raise StageError("embed", f"batch {b}: encoder returned shape {vecs.shape}")
        out[start : start + len(chunk)] = vecs
    n_bad = int(is_degenerate(out).sum())
    if n_bad:
        logger.warning("%d degenerate embeddings will be routed to clustering as noise", n_bad)
    return out
