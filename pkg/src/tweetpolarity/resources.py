"""Loaders for sentiment lexicons, word embeddings and word clusters.

All three formats are UTF-8 text with ``\\n`` line endings:

* lexicon: ``term<TAB>score`` with a signed, non-zero, finite score;
* embeddings: word2vec text, an optional ``vocab_count dim`` header then
  ``word v1 ... vd`` lines;
* clusters: ``word<TAB>cluster`` or Brown ``path<TAB>word<TAB>count``.

Lines starting with ``#`` are comments when they cannot be read as an entry
(no tab for the TSV formats, non-numeric components for embeddings); this
keeps hashtag terms such as ``#happy`` loadable.
"""

from __future__ import annotations

import hashlib
import io
import logging
import math
import os
from dataclasses import dataclass
from types import MappingProxyType
from typing import BinaryIO, Mapping, Union

import numpy as np

log = logging.getLogger(__name__)

Source = Union[BinaryIO, bytes, str, os.PathLike]


class ResourceError(ValueError):
    """A resource file is malformed. ``lineno`` is 1-based, or None."""

    def __init__(self, message: str, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


@dataclass(frozen=True)
class Lexicon:
    name: str
    scores: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "scores", MappingProxyType(dict(self.scores)))

    def __len__(self):
        return len(self.scores)

    def get(self, term: str):
        return self.scores.get(term)

    def __reduce__(self):
        return Lexicon, (self.name, dict(self.scores))


@dataclass(frozen=True)
class EmbeddingModel:
    dim: int
    vectors: Mapping[str, np.ndarray]

    def __post_init__(self):
        frozen = {}
        for word, vec in self.vectors.items():
            arr = np.array(vec, dtype=np.float64)
            if arr.shape != (self.dim,):
                raise ResourceError(f"vector for {word!r} has shape {arr.shape}, expected ({self.dim},)")
            arr.flags.writeable = False
            frozen[word] = arr
        object.__setattr__(self, "vectors", MappingProxyType(frozen))

    def __len__(self):
        return len(self.vectors)

    def get(self, word: str):
        return self.vectors.get(word)

    def __reduce__(self):
        return EmbeddingModel, (self.dim, dict(self.vectors))


@dataclass(frozen=True)
class ClusterMap:
    assignment: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "assignment", MappingProxyType(dict(self.assignment)))

    def __len__(self):
        return len(self.assignment)

    def get(self, word: str):
        return self.assignment.get(word)

    def __reduce__(self):
        return ClusterMap, (dict(self.assignment),)


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    return source.read()


def _lines(source: Source):
    data = _read_bytes(source)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ResourceError(f"not valid UTF-8: {exc}") from None
    if text.startswith("﻿"):
        text = text[1:]
    for lineno, line in enumerate(text.split("\n"), 1):
        yield lineno, line.rstrip("\r")


def fingerprint(source: Union[str, os.PathLike], name: str = None) -> dict:
    """Identify a resource file by name, byte size and SHA-256."""
    with open(source, "rb") as fh:
        data = fh.read()
    return {
        "name": name or os.path.basename(os.fspath(source)),
        "size": len(data),
        "sha256": hashlib.sha256(data).hexdigest(),
    }


def load_lexicon(source: Source, name: str) -> Lexicon:
    scores = {}
    for lineno, line in _lines(source):
        if not line.strip():
            continue
        if line.startswith("#") and "\t" not in line:
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ResourceError(f"expected term<TAB>score, got {len(cols)} column(s)", lineno)
        term, raw = cols
        if not term:
            raise ResourceError("empty term", lineno)
        try:
            score = float(raw)
        except ValueError:
            raise ResourceError(f"score {raw!r} is not a number", lineno) from None
        if not math.isfinite(score):
            raise ResourceError(f"score {raw!r} is not finite", lineno)
        if score == 0.0:
            raise ResourceError(f"zero score for {term!r}; entries must be positive or negative", lineno)
        scores[term] = score
    return Lexicon(name, scores)


def dump_lexicon(lexicon: Lexicon) -> bytes:
    return "".join(f"{t}\t{s!r}\n" for t, s in lexicon.scores.items()).encode("utf-8")


def _parse_floats(fields):
    try:
        return [float(f) for f in fields]
    except ValueError:
        return None


def load_embeddings(source: Source) -> EmbeddingModel:
    dim = None
    declared = None
    vectors = {}
    seen_content = False
    for lineno, line in _lines(source):
        fields = line.split()
        if not fields:
            continue
        values = _parse_floats(fields[1:])
        if fields[0].startswith("#") and (values is None or not values):
            continue
        if not seen_content:
            seen_content = True
            if len(fields) == 2 and fields[0].isdigit() and fields[1].isdigit():
                declared, dim = int(fields[0]), int(fields[1])
                if dim <= 0:
                    raise ResourceError(f"header declares dimension {dim}", lineno)
                continue
        if values is None:
            raise ResourceError(f"non-numeric vector component for {fields[0]!r}", lineno)
        if not values:
            raise ResourceError(f"word {fields[0]!r} has no vector", lineno)
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise ResourceError(f"dimension mismatch for {fields[0]!r}: got {len(values)}, expected {dim}", lineno)
        if not all(math.isfinite(v) for v in values):
            raise ResourceError(f"non-finite component in vector for {fields[0]!r}", lineno)
        vectors[fields[0]] = values
    if not vectors:
        raise ResourceError("embedding file holds no vectors")
    if declared is not None and declared != len(vectors):
        log.warning("embedding header declares %d words, found %d", declared, len(vectors))
    return EmbeddingModel(dim, vectors)


def dump_embeddings(model: EmbeddingModel, header: bool = True) -> bytes:
    out = io.StringIO()
    if header:
        out.write(f"{len(model)} {model.dim}\n")
    for word, vec in model.vectors.items():
        out.write(word + " " + " ".join(repr(float(v)) for v in vec) + "\n")
    return out.getvalue().encode("utf-8")


def load_clusters(source: Source) -> ClusterMap:
    width = None
    assignment = {}
    for lineno, line in _lines(source):
        if not line.strip():
            continue
        if line.startswith("#") and "\t" not in line:
            continue
        cols = line.split("\t")
        if width is None:
            if len(cols) not in (2, 3):
                raise ResourceError(f"expected 2 or 3 tab-separated columns, got {len(cols)}", lineno)
            width = len(cols)
        elif len(cols) != width:
            raise ResourceError(f"inconsistent column count: {len(cols)} after {width}-column lines", lineno)
        word, cluster = (cols[1], cols[0]) if width == 3 else (cols[0], cols[1])
        if not word or not cluster:
            raise ResourceError("empty word or cluster id", lineno)
        assignment[word] = cluster
    return ClusterMap(assignment)


def dump_clusters(clusters: ClusterMap) -> bytes:
    return "".join(f"{w}\t{c}\n" for w, c in clusters.assignment.items()).encode("utf-8")
