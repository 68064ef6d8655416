"""End-to-end glue: run configuration, resource loading, training, prediction."""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import resources as res
from .evaluation import CLASSES
from .features import FAMILIES, Featurizer, build_vocabulary, vectorize
from .svm import (DEFAULT_C, DEFAULT_MAX_EPOCHS, DEFAULT_SEED, DEFAULT_TOL,
                  ModelFormatError, SvmModel, train_ovr)
from .text import LanguageProfile, Tweet, preprocess, preprocess_tagged

log = logging.getLogger(__name__)

BASE_FAMILIES = ("bow", "bonw", "pos", "bitagged")
# family -> CLI flag that supplies its files
_RESOURCE_FAMILY = {"lexicons": "--lexicon", "clusters": "--clusters", "embeddings": "--embeddings"}


class ConfigError(ValueError):
    pass


def parse_resource_spec(spec: str) -> tuple:
    """``name=path`` or a bare path (name = file stem)."""
    if "=" in spec and not os.path.exists(spec):
        name, path = spec.split("=", 1)
        if name:
            return name, path
    stem = os.path.splitext(os.path.basename(spec))[0]
    return stem, spec


@dataclass
class RunConfig:
    language: str = "en"
    features: Optional[list] = None
    lexicons: list = field(default_factory=list)
    clusters: list = field(default_factory=list)
    embeddings: list = field(default_factory=list)
    C: float = DEFAULT_C
    tol: float = DEFAULT_TOL
    max_epochs: int = DEFAULT_MAX_EPOCHS
    seed: int = DEFAULT_SEED
    negation_words: Optional[list] = None
    negation_suffix: Optional[str] = None
    tagged: bool = False
    skip_bad: bool = False
    jobs: int = 1

    KEYS = ("language", "features", "lexicons", "clusters", "embeddings", "C", "tol",
            "max_epochs", "seed", "negation_words", "negation_suffix", "tagged", "skip_bad", "jobs")

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        return cls().updated(data)

    def updated(self, data: dict) -> "RunConfig":
        aliases = {"lang": "language", "c": "C"}
        for key, value in data.items():
            key = aliases.get(key, key).replace("-", "_")
            if key not in self.KEYS:
                raise ConfigError(f"unknown configuration key {key!r}")
            if key == "features" and isinstance(value, str):
                value = [v.strip() for v in value.split(",") if v.strip()]
            setattr(self, key, value)
        return self

    @property
    def profile(self) -> LanguageProfile:
        try:
            profile = LanguageProfile.for_language(self.language)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return profile.with_negation(self.negation_words, self.negation_suffix)

    def families(self) -> frozenset:
        if self.features is None:
            fams = set(BASE_FAMILIES)
            fams.update(f for f in _RESOURCE_FAMILY if getattr(self, f))
        else:
            fams = set(self.features)
        unknown = fams - set(FAMILIES)
        if unknown:
            raise ConfigError(f"unknown feature families: {', '.join(sorted(unknown))}")
        if not fams:
            raise ConfigError("at least one feature family must be enabled")
        return frozenset(fams)

    def validate(self) -> None:
        fams = self.families()
        for fam in _RESOURCE_FAMILY:
            specs = getattr(self, fam)
            if fam in fams and not specs:
                raise ConfigError(f"feature family {fam!r} is enabled but no {_RESOURCE_FAMILY[fam]} file was given")
            for spec in specs:
                _, path = parse_resource_spec(spec)
                if not os.path.isfile(path):
                    raise ConfigError(f"{fam} resource not found: {path}")
        if not self.C > 0:
            raise ConfigError(f"C must be positive, got {self.C}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if int(self.max_epochs) < 1:
            raise ConfigError(f"max_epochs must be at least 1, got {self.max_epochs}")
        self.profile  # raises on a bad language


def load_resources(config: RunConfig) -> tuple:
    """Load every configured resource. Returns ``(Featurizer, resource records)``."""
    fams = config.families()
    records = {"lexicons": [], "clusters": [], "embeddings": []}
    lexicons, clusters, embeddings = [], {}, {}
    for fam in records:
        if fam not in fams:
            continue
        for spec in getattr(config, fam):
            name, path = parse_resource_spec(spec)
            try:
                if fam == "lexicons":
                    obj = res.load_lexicon(path, name)
                    lexicons.append(obj)
                elif fam == "clusters":
                    obj = clusters[name] = res.load_clusters(path)
                else:
                    obj = embeddings[name] = res.load_embeddings(path)
            except res.ResourceError as exc:
                raise ConfigError(f"{path}: {exc}") from None
            record = {"name": name, "path": os.path.abspath(path), "fingerprint": res.fingerprint(path, name)}
            if fam == "embeddings":
                record["dim"] = obj.dim
            records[fam].append(record)
    featurizer = Featurizer(config.profile, fams, lexicons, clusters, embeddings)
    return featurizer, records


def tokens_for(tweet: Tweet, profile: LanguageProfile, tagged: bool = False) -> list:
    if tagged:
        return preprocess_tagged(tweet.tokens, profile)
    return preprocess(tweet.text, profile)


_worker_state = {}


def _init_worker(featurizer, tagged):
    _worker_state["featurizer"] = featurizer
    _worker_state["tagged"] = tagged


def _featurize_one(tweet):
    fz = _worker_state["featurizer"]
    return fz(tokens_for(tweet, fz.profile, _worker_state["tagged"]))


def featurize(featurizer: Featurizer, tweets: Sequence[Tweet], tagged: bool = False,
              jobs: int = 1) -> list:
    """Feature pairs ``(symbolic, dense)`` for each tweet, in input order."""
    if jobs <= 1 or len(tweets) < 2:
        return [featurizer(tokens_for(t, featurizer.profile, tagged)) for t in tweets]
    with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(featurizer, tagged)) as pool:
        return list(pool.map(_featurize_one, tweets, chunksize=max(1, len(tweets) // (4 * jobs))))


@dataclass
class TrainSummary:
    dim: int
    support: dict
    epochs: dict
    dual_objective: dict
    converged: dict

    def lines(self) -> list:
        out = [f"feature space dimension D = {self.dim}"]
        for cls in self.support:
            out.append(f"  {cls:<9} support={self.support[cls]:<6} epochs={self.epochs[cls]:<5} "
                       f"dual={self.dual_objective[cls]:.6f}"
                       + ("" if self.converged[cls] else "  (max epochs reached)"))
        return out


def train(config: RunConfig, tweets: Sequence[Tweet]) -> tuple:
    """Featurize labeled tweets, freeze the feature space and fit one-vs-rest machines."""
    config.validate()
    if not tweets:
        raise ConfigError("training corpus is empty")
    unlabeled = [t.id for t in tweets if t.label is None]
    if unlabeled:
        raise ConfigError(f"{len(unlabeled)} training tweet(s) lack a label (first: {unlabeled[0]})")
    labels = [t.label for t in tweets]
    if len(set(labels)) < 2:
        raise ConfigError(f"training corpus holds a single class ({labels[0]}); need at least two")
    featurizer, records = load_resources(config)
    pairs = featurize(featurizer, tweets, config.tagged, config.jobs)
    space = build_vocabulary([sym for sym, _ in pairs], featurizer.embed_dims())
    X = [vectorize(sym, space, dense) for sym, dense in pairs]
    pipeline_config = {
        "profile": config.profile.to_dict(),
        "families": sorted(featurizer.families),
        "resources": records,
    }
    model = train_ovr(X, labels, C=config.C, tol=config.tol, max_epochs=int(config.max_epochs),
                      seed=int(config.seed), space=space, pipeline_config=pipeline_config)
    summary = TrainSummary(
        space.dim,
        {c: labels.count(c) for c in model.classes},
        {c: m.epochs for c, m in zip(model.classes, model.machines)},
        {c: m.dual_objective for c, m in zip(model.classes, model.machines)},
        {c: m.converged for c, m in zip(model.classes, model.machines)},
    )
    return model, summary


def featurizer_for_model(model: SvmModel, overrides: Optional[RunConfig] = None) -> Featurizer:
    """Rebuild the training-time featurizer from a model's stored configuration.

    Resources are reloaded from their recorded paths unless ``overrides``
    names a replacement with the same source name. Missing files and changed
    fingerprints only log warnings; an embedding whose width no longer
    matches the model's block is an error.
    """
    cfg = model.pipeline_config
    if not cfg or "profile" not in cfg or model.space is None:
        raise ModelFormatError("model file lacks its pipeline configuration")
    profile = LanguageProfile.from_dict(cfg["profile"])
    families = frozenset(cfg["families"])
    replacement = {}
    if overrides is not None:
        for fam in _RESOURCE_FAMILY:
            for spec in getattr(overrides, fam):
                name, path = parse_resource_spec(spec)
                replacement[(fam, name)] = path

    lexicons, clusters, embeddings = [], {}, {}
    for fam, records in cfg.get("resources", {}).items():
        for rec in records:
            name = rec["name"]
            path = replacement.get((fam, name), rec["path"])
            if fam == "clusters":
                clusters[name] = None
            elif fam == "embeddings":
                embeddings[name] = None
            if not os.path.isfile(path):
                log.warning("%s resource %r not found at %s; its features will be empty", fam, name, path)
                continue
            fp = res.fingerprint(path, name)
            if fp["sha256"] != rec["fingerprint"]["sha256"]:
                log.warning("%s resource %r at %s differs from the one used in training", fam, name, path)
            if fam == "lexicons":
                lexicons.append(res.load_lexicon(path, name))
            elif fam == "clusters":
                clusters[name] = res.load_clusters(path)
            elif fam == "embeddings":
                emb = res.load_embeddings(path)
                width = dict(model.space.embedding_blocks).get(name)
                if width is not None and width != 4 * emb.dim:
                    raise ModelFormatError(
                        f"embedding {name!r} has dimension {emb.dim} but the model expects {width // 4}")
                embeddings[name] = emb
    return Featurizer(profile, families, lexicons, clusters, embeddings)


@dataclass
class Prediction:
    id: str
    label: str
    scores: dict


def predict_tweets(model: SvmModel, featurizer: Featurizer, tweets: Sequence[Tweet],
                   tagged: bool = False, jobs: int = 1) -> list:
    out = []
    for tweet, (sym, dense) in zip(tweets, featurize(featurizer, tweets, tagged, jobs)):
        x = vectorize(sym, model.space, dense)
        s = model.scores(x)
        out.append(Prediction(tweet.id, model.classes[int(np.argmax(s))], dict(zip(model.classes, s.tolist()))))
    return out


def format_prediction(p: Prediction) -> str:
    cols = [p.id, p.label]
    for cls in CLASSES:
        cols.append(repr(p.scores[cls]) if cls in p.scores else "-")
    return "\t".join(cols)
