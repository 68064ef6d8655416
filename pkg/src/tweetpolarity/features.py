"""Feature families and the frozen feature space.

Symbolic features are plain ``dict`` objects mapping a namespaced name
(``family:payload``) to a float. The grammar is part of the model file
contract:

* ``bow<n>:w1_w2`` n-grams over negation-suffixed surfaces, n in 1..4
* ``bonw<n>:w1_w2`` n-grams inside negated runs, unsuffixed
* ``pos:<tag>`` tag counts
* ``bt:<w1>_<t1>__<w2>_<t2>`` bi-tagged pairs
* ``lex:<lexicon>:<stat>`` the seven lexicon statistics
* ``clu:<source>:<cluster>`` cluster presence

Embedding pooling produces dense blocks that sit after the symbolic columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .resources import ClusterMap, EmbeddingModel, Lexicon
from .text import LanguageProfile, Token

NGRAM_ORDERS = (1, 2, 3, 4)
LEXICON_STATS = ("polarity", "avg_pos", "avg_neg", "last_pos", "last_neg", "max_pos", "min_neg")
POOLS = ("max", "min", "sum", "std")
FAMILIES = ("bow", "bonw", "pos", "bitagged", "lexicons", "clusters", "embeddings")


def _ngrams(forms: Sequence[str], prefix: str, out: dict):
    for n in NGRAM_ORDERS:
        for i in range(len(forms) - n + 1):
            out[f"{prefix}{n}:" + "_".join(forms[i:i + n])] = 1.0


def extract_bow(tokens: Sequence[Token], suffix: str = "_NEG") -> dict:
    """Binary presence of every 1- to 4-gram over feature-time surfaces."""
    out = {}
    _ngrams([t.feature_form(suffix) for t in tokens], "bow", out)
    return out


def negated_runs(tokens: Sequence[Token]):
    run = []
    for tok in tokens:
        if tok.negated:
            run.append(tok.surface)
        elif run:
            yield run
            run = []
    if run:
        yield run


def extract_bonw(tokens: Sequence[Token]) -> dict:
    """1- to 4-grams restricted to maximal negated runs (unsuffixed)."""
    out = {}
    for run in negated_runs(tokens):
        _ngrams(run, "bonw", out)
    return out


def extract_pos_counts(tokens: Sequence[Token]) -> dict:
    out = {}
    for tok in tokens:
        if tok.pos:
            key = "pos:" + tok.pos
            out[key] = out.get(key, 0.0) + 1.0
    return out


def extract_bitagged(tokens: Sequence[Token], suffix: str = "_NEG") -> dict:
    out = {}
    for a, b in zip(tokens, tokens[1:]):
        if a.pos and b.pos:
            out[f"bt:{a.feature_form(suffix)}_{a.pos}__{b.feature_form(suffix)}_{b.pos}"] = 1.0
    return out


def polarity_from_counts(positive: int, negative: int) -> float:
    """Signed polarity ratio from positive/negative hit counts, in [-1, 1]."""
    if positive > negative:
        return 1.0 - negative / positive
    if positive < negative:
        return positive / negative - 1.0
    return 0.0


def _lexicon_hits(tokens: Sequence[Token], lexicon: Lexicon):
    scores = (lexicon.get(t.surface) for t in tokens)
    return [s for s in scores if s is not None]


def lexicon_polarity(tokens: Sequence[Token], lexicon: Lexicon) -> float:
    hits = _lexicon_hits(tokens, lexicon)
    return polarity_from_counts(sum(s > 0 for s in hits), sum(s < 0 for s in hits))


def lexicon_features(tokens: Sequence[Token], lexicon: Lexicon) -> dict:
    """The seven per-lexicon statistics; a statistic over an empty set is 0.

    Lookups use unsuffixed surfaces and single tokens only; negation does not
    flip scores.
    """
    hits = _lexicon_hits(tokens, lexicon)
    pos = [s for s in hits if s > 0]
    neg = [s for s in hits if s < 0]
    values = (
        polarity_from_counts(len(pos), len(neg)),
        sum(pos) / len(pos) if pos else 0.0,
        sum(neg) / len(neg) if neg else 0.0,
        pos[-1] if pos else 0.0,
        neg[-1] if neg else 0.0,
        max(pos) if pos else 0.0,
        min(neg) if neg else 0.0,
    )
    prefix = f"lex:{lexicon.name}:"
    return {prefix + stat: float(v) for stat, v in zip(LEXICON_STATS, values)}


def cluster_features(tokens: Sequence[Token], cluster_map: ClusterMap, source: str) -> dict:
    out = {}
    for tok in tokens:
        cluster = cluster_map.get(tok.surface)
        if cluster is not None:
            out[f"clu:{source}:{cluster}"] = 1.0
    return out


def embed_pool(tokens: Sequence[Token], model: EmbeddingModel) -> np.ndarray:
    """Concatenate element-wise max, min, sum and population std pools.

    Out-of-vocabulary tokens are skipped; with no known word the result is a
    zero vector of length ``4 * model.dim``.
    """
    found = [v for v in (model.get(t.surface) for t in tokens) if v is not None]
    if not found:
        return np.zeros(4 * model.dim)
    W = np.stack(found)
    return np.concatenate([W.max(axis=0), W.min(axis=0), W.sum(axis=0), W.std(axis=0)])


@dataclass(frozen=True)
class SparseVector:
    indices: np.ndarray
    values: np.ndarray
    dim: int

    def dot(self, dense: np.ndarray) -> float:
        return float(dense[self.indices] @ self.values)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    @classmethod
    def from_dense(cls, dense) -> "SparseVector":
        dense = np.asarray(dense, dtype=np.float64)
        idx = np.flatnonzero(dense)
        return cls(idx, dense[idx], dense.shape[0])

    def __len__(self):
        return len(self.indices)


class FeatureSpace:
    """Frozen name -> column mapping followed by dense embedding blocks."""

    def __init__(self, names: Sequence[str], embedding_blocks: Sequence[tuple] = ()):
        self.names = tuple(names)
        self.index = {n: i for i, n in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise ValueError("duplicate feature names")
        self.embedding_blocks = tuple((str(s), int(w)) for s, w in embedding_blocks)
        self.block_offsets = {}
        offset = len(self.names)
        for source, width in self.embedding_blocks:
            if source in self.block_offsets:
                raise ValueError(f"duplicate embedding source {source!r}")
            self.block_offsets[source] = offset
            offset += width
        self.dim = offset

    def __len__(self):
        return self.dim

    def __eq__(self, other):
        return (isinstance(other, FeatureSpace) and self.names == other.names
                and self.embedding_blocks == other.embedding_blocks)

    def lookup(self, name: str) -> Optional[int]:
        return self.index.get(name)

    def to_dict(self) -> dict:
        return {"names": list(self.names), "embedding_blocks": [list(b) for b in self.embedding_blocks]}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureSpace":
        return cls(data["names"], [tuple(b) for b in data["embedding_blocks"]])


def build_vocabulary(corpus: Sequence[Mapping[str, float]],
                     embed_dims: Iterable[tuple] = ()) -> FeatureSpace:
    """Sorted union of training feature names, then one block per embedding source."""
    if not corpus:
        raise ValueError("cannot build a feature space from an empty corpus")
    names = set()
    for fs in corpus:
        names.update(fs)
    return FeatureSpace(sorted(names), embed_dims)


def vectorize(features: Mapping[str, float], space: FeatureSpace,
              embeddings: Optional[Mapping[str, np.ndarray]] = None) -> SparseVector:
    """Map one tweet onto ``space``. Unknown names are dropped, zeros omitted."""
    cols, vals = [], []
    for name, value in features.items():
        col = space.index.get(name)
        if col is not None and value != 0.0:
            cols.append(col)
            vals.append(float(value))
    for source, width in space.embedding_blocks:
        pooled = (embeddings or {}).get(source)
        if pooled is None:
            continue
        pooled = np.asarray(pooled, dtype=np.float64)
        if pooled.shape != (width,):
            raise ValueError(f"embedding block {source!r} expects {width} values, got {pooled.shape}")
        nz = np.flatnonzero(pooled)
        cols.extend((space.block_offsets[source] + nz).tolist())
        vals.extend(pooled[nz].tolist())
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    order = np.argsort(cols, kind="stable")
    return SparseVector(cols[order], vals[order], space.dim)


@dataclass
class Featurizer:
    """Bundles a language profile, enabled families and loaded resources.

    ``lexicons`` holds :class:`Lexicon` objects; ``clusters`` and
    ``embeddings`` map a source name to a :class:`ClusterMap` or an
    :class:`EmbeddingModel`. A missing entry (``None``) contributes nothing,
    which is how predict-time runs survive absent resources.
    """

    profile: LanguageProfile
    families: frozenset = frozenset(("bow", "bonw", "pos", "bitagged"))
    lexicons: list = field(default_factory=list)
    clusters: dict = field(default_factory=dict)
    embeddings: dict = field(default_factory=dict)

    def __post_init__(self):
        self.families = frozenset(self.families)
        unknown = self.families - set(FAMILIES)
        if unknown:
            raise ValueError(f"unknown feature families: {', '.join(sorted(unknown))}")
        if not self.families:
            raise ValueError("at least one feature family must be enabled")

    def symbolic(self, tokens: Sequence[Token]) -> dict:
        suffix = self.profile.negation_suffix
        out = {}
        if "bow" in self.families:
            out.update(extract_bow(tokens, suffix))
        if "bonw" in self.families:
            out.update(extract_bonw(tokens))
        if "pos" in self.families:
            out.update(extract_pos_counts(tokens))
        if "bitagged" in self.families:
            out.update(extract_bitagged(tokens, suffix))
        if "lexicons" in self.families:
            for lex in self.lexicons:
                out.update(lexicon_features(tokens, lex))
        if "clusters" in self.families:
            for source, cmap in self.clusters.items():
                if cmap is not None:
                    out.update(cluster_features(tokens, cmap, source))
        return out

    def dense(self, tokens: Sequence[Token]) -> dict:
        if "embeddings" not in self.families:
            return {}
        return {source: embed_pool(tokens, model)
                for source, model in self.embeddings.items() if model is not None}

    def embed_dims(self) -> list:
        if "embeddings" not in self.families:
            return []
        return [(source, 4 * model.dim) for source, model in self.embeddings.items()]

    def __call__(self, tokens: Sequence[Token]) -> tuple:
        return self.symbolic(tokens), self.dense(tokens)
