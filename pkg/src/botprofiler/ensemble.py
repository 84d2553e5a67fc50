"""Bot classifiers: logistic regression, two-hidden-layer FFNN, per-band
multiple classification, and the eight-branch ensemble with a stacked final
classifier.

Every gradient-trained classifier here is one MlpClassifier: zero hidden
layers gives logistic regression, two gives the FFNN, and the optimizer picks
between Adam and plain SGD. Branch routing consults only the four branches
matching an item's profile bands, so predictions are bit-identical under any
perturbation of the other four.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    EmptyPartition,
    MissingProfile,
    ShapeMismatch,
    SingleClassTrainingSet,
    UsageError,
)
from .features import FeatureExtractor, FeatureLayout
from .metrics import MetricsReport, compute_metrics
from .corpus import Corpus, corpus_fingerprint
from .nn import Adam, Dense, LayerMix, Sgd, save_params, load_params, sigmoid_bce_with_logits
from .profiles import ATTRIBUTES, BANDS

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5
FINAL_VARIANTS = ("ffnn", "logreg", "sgd")


@dataclass(frozen=True)
class BranchKey:
    attribute: str
    band: str

    def __post_init__(self):
        if self.attribute not in BANDS or self.band not in BANDS[self.attribute]:
            raise ShapeMismatch(f"invalid branch key {self.attribute}/{self.band}")

    @property
    def tag(self) -> str:
        return f"{self.attribute}.{self.band}"


def all_branch_keys() -> list[BranchKey]:
    return [BranchKey(a, b) for a in ATTRIBUTES for b in BANDS[a]]


@dataclass(frozen=True)
class Prediction:
    item_id: str
    prob_bot: float
    label: str  # "bot" | "human"
    unit: str  # "tweet" | "account"
    branch_probs: dict[str, float] | None = None


@dataclass
class TrainSettings:
    epochs: int = 40
    lr: float = 1e-2
    batch_size: int = 64
    hidden: tuple[int, ...] = (32, 16)
    final_hidden: tuple[int, ...] = (8, 4)
    final_epochs: int = 120
    class_weighting: bool = False
    l2: float = 1e-4
    final_l2: float = 1e-2


class MlpClassifier:
    """Standardizer + optional trainable layer mix + dense stack + sigmoid.

    `layout` routes the contextual region of pre-mix feature rows through a
    LayerMix block; without a layout, rows are used as-is (e.g. the 16-dim
    stack features of the final classifier).
    """

    def __init__(
        self,
        hidden: tuple[int, ...] = (),
        seed: int = 0,
        layout: FeatureLayout | None = None,
        activation: str = "relu",
        optimizer: str = "adam",
    ):
        self.hidden = tuple(hidden)
        self.seed = seed
        self.layout = layout
        self.activation = activation
        self.optimizer = optimizer
        self.mix: LayerMix | None = None
        self.denses: list[Dense] = []
        self.mu: np.ndarray | None = None
        self.sd: np.ndarray | None = None

    # -- forward pieces ------------------------------------------------------

    def _assemble(self, x):
        """Standardize and mix; returns (z, mix_cache) with z [n, post_dim]."""
        z = (x - self.mu) / self.sd
        if self.layout is None or self.mix is None:
            return z, None
        c0, c1 = self.layout.ctx_span
        blocks = z[:, c0:c1].reshape(len(z), self.layout.ctx_blocks, self.layout.ctx_dim)
        mixed, cache = self.mix.forward(blocks)
        z = np.concatenate([z[:, :c0], mixed, z[:, c1:]], axis=1)
        return z, cache

    def _logits(self, x, want_caches=False):
        z, mix_cache = self._assemble(x)
        caches = []
        for dense in self.denses:
            z, cache = dense.forward(z)
            caches.append(cache)
        logits = z[:, 0]
        if want_caches:
            return logits, caches, mix_cache
        return logits

    def _check_fitted(self):
        if not self.denses:
            raise UsageError("classifier has not been fitted")

    # -- training ------------------------------------------------------------

    def fit(
        self,
        x: np.ndarray,
        y: np.ndarray,
        epochs: int = 40,
        lr: float = 1e-2,
        batch_size: int = 64,
        class_weight: dict[int, float] | None = None,
        l2: float = 0.0,
    ):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if x.ndim != 2 or y.shape != (x.shape[0],):
            raise ShapeMismatch(f"fit got x {x.shape}, y {y.shape}")
        if len(np.unique(y)) < 2:
            raise SingleClassTrainingSet(
                "training set holds a single class; cannot fit a classifier"
            )
        if self.layout is not None and x.shape[1] != self.layout.pre_mix_dim:
            raise ShapeMismatch(
                f"rows have {x.shape[1]} columns, layout wants {self.layout.pre_mix_dim}"
            )
        rng = np.random.default_rng(self.seed)
        self.mu = x.mean(axis=0)
        self.sd = np.maximum(x.std(axis=0), 1e-8)

        in_dim = x.shape[1]
        if self.layout is not None:
            self.mix = LayerMix(
                np.zeros(self.layout.ctx_blocks)
                if self.layout.mix_scalars is None
                else np.array(self.layout.mix_scalars, dtype=np.float64)
            )
            in_dim = self.layout.post_mix_dim
        self.denses = []
        for width in self.hidden:
            self.denses.append(Dense.create(rng, in_dim, width, self.activation))
            in_dim = width
        self.denses.append(Dense.create(rng, in_dim, 1, "identity"))

        params = self.params(trainable_only=True)
        opt = (Adam if self.optimizer == "adam" else Sgd)(params, lr=lr)
        weights = None
        if class_weight:
            weights = np.where(y > 0.5, class_weight.get(1, 1.0), class_weight.get(0, 1.0))

        n = len(x)
        for _ in range(epochs):
            order = rng.permutation(n)
            for start in range(0, n, batch_size):
                idx = order[start : start + batch_size]
                loss, grads = self._loss_and_grads(
                    x[idx], y[idx], None if weights is None else weights[idx]
                )
                if l2:
                    for k, dense in enumerate(self.denses):
                        grads[f"dense{k}.w"] += l2 * dense.w
                opt.step({k: grads[k] for k in params})
        return self

    def _loss_and_grads(self, x, y, weights=None):
        logits, caches, mix_cache = self._logits(x, want_caches=True)
        loss_sum, dlogits = sigmoid_bce_with_logits(logits, y)
        if weights is not None:
            dlogits = dlogits * weights
            loss_sum = float(
                np.sum(weights * (np.maximum(logits, 0) - logits * y + np.log1p(np.exp(-np.abs(logits)))))
            )
        scale = 1.0 / len(x)
        dz = (dlogits * scale)[:, None]
        grads: dict[str, np.ndarray] = {}
        for k in range(len(self.denses) - 1, -1, -1):
            dz, dense_grads = self.denses[k].backward(dz, caches[k])
            grads[f"dense{k}.w"] = dense_grads["w"]
            grads[f"dense{k}.b"] = dense_grads["b"]
        if self.mix is not None and mix_cache is not None:
            c0, _ = self.layout.ctx_span
            dmixed = dz[:, c0 : c0 + self.layout.ctx_dim]
            _, mix_grads = self.mix.backward(dmixed, mix_cache)
            grads["mix.s"] = mix_grads["s"]
        return loss_sum * scale, grads

    def params(self, trainable_only: bool = False) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for k, dense in enumerate(self.denses):
            out[f"dense{k}.w"] = dense.w
            out[f"dense{k}.b"] = dense.b
        if self.mix is not None:
            if not trainable_only or (self.layout and self.layout.mix_mode == "learned"):
                out["mix.s"] = self.mix.s
        return out

    # -- inference -------------------------------------------------------------

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        self._check_fitted()
        x = np.asarray(x, dtype=np.float64)
        from .nn import sigmoid

        return sigmoid(self._logits(x))

    # -- persistence -------------------------------------------------------------

    def state_arrays(self) -> dict[str, np.ndarray]:
        self._check_fitted()
        out = dict(self.params())
        out["scaler.mu"] = self.mu
        out["scaler.sd"] = self.sd
        return out

    def meta(self) -> dict:
        return {
            "hidden": list(self.hidden),
            "seed": self.seed,
            "activation": self.activation,
            "optimizer": self.optimizer,
            "layout": None if self.layout is None else self.layout.to_dict(),
        }

    @classmethod
    def from_state(cls, meta: dict, arrays: dict[str, np.ndarray]) -> "MlpClassifier":
        layout = None if meta["layout"] is None else FeatureLayout.from_dict(meta["layout"])
        model = cls(
            hidden=tuple(meta["hidden"]),
            seed=meta["seed"],
            layout=layout,
            activation=meta["activation"],
            optimizer=meta["optimizer"],
        )
        model.mu = arrays["scaler.mu"]
        model.sd = arrays["scaler.sd"]
        if "mix.s" in arrays:
            model.mix = LayerMix(arrays["mix.s"])
        k = 0
        denses = []
        while f"dense{k}.w" in arrays:
            act = model.activation if k < len(model.hidden) else "identity"
            denses.append(Dense(arrays[f"dense{k}.w"], arrays[f"dense{k}.b"], act))
            k += 1
        model.denses = denses
        return model

    def save(self, path):
        save_params(path, self.state_arrays(), {"kind": "mlp", **self.meta()})

    @classmethod
    def load(cls, path) -> "MlpClassifier":
        arrays, meta = load_params(path)
        return cls.from_state(meta, arrays)


# -- scoring helpers ----------------------------------------------------------


def tweet_scores(model, corpus: Corpus, extractor: FeatureExtractor) -> dict[str, float]:
    """prob_bot per tweet id; `model` is any of the classifier family."""
    if isinstance(model, (MultipleModel, EnsembleModel)):
        return model.tweet_probs(corpus, extractor)
    order = sorted(corpus.tweets)
    probs = model.predict_proba(extractor.matrix(corpus, order))
    return dict(zip(order, probs.tolist()))


def account_scores(tweet_probs: dict[str, float], corpus: Corpus) -> dict[str, float]:
    """Account prob = mean of its tweets' probabilities."""
    out = {}
    for aid in sorted(corpus.accounts):
        ids = corpus.accounts[aid].tweet_ids
        out[aid] = float(np.mean([tweet_probs[t] for t in sorted(ids)]))
    return out


def scored_pairs(model, corpus, extractor, unit: str = "tweet") -> list[tuple[float, bool]]:
    probs = tweet_scores(model, corpus, extractor)
    if unit == "tweet":
        return [
            (probs[t], corpus.accounts[corpus.tweets[t].account_id].is_bot)
            for t in sorted(corpus.tweets)
        ]
    if unit == "account":
        acc = account_scores(probs, corpus)
        return [(acc[a], corpus.accounts[a].is_bot) for a in sorted(corpus.accounts)]
    raise UsageError(f"unknown unit {unit!r}")


def evaluate_model(model, corpus, extractor, unit="tweet", tag="model") -> MetricsReport:
    return compute_metrics(
        scored_pairs(model, corpus, extractor, unit),
        classifier=tag,
        unit=unit,
        fingerprint=corpus_fingerprint(corpus),
    )


# -- spec training operations ---------------------------------------------------


def _fit_on_corpus(model: MlpClassifier, corpus, extractor, settings: TrainSettings):
    x = extractor.matrix(corpus)
    y = extractor.labels(corpus)
    weight = None
    if settings.class_weighting:
        pos = max(y.sum(), 1.0)
        neg = max(len(y) - y.sum(), 1.0)
        weight = {1: len(y) / (2 * pos), 0: len(y) / (2 * neg)}
    model.fit(
        x,
        y,
        epochs=settings.epochs,
        lr=settings.lr,
        batch_size=settings.batch_size,
        class_weight=weight,
        l2=settings.l2,
    )
    return model


def train_logreg(
    corpus,
    extractor: FeatureExtractor,
    seed: int = 0,
    eval_corpus=None,
    settings: TrainSettings | None = None,
):
    """Gradient-trained logistic regression over the extractor's features."""
    settings = settings or TrainSettings()
    model = MlpClassifier(hidden=(), seed=seed, layout=extractor.layout)
    _fit_on_corpus(model, corpus, extractor, settings)
    report = None
    if eval_corpus is not None:
        report = evaluate_model(model, eval_corpus, extractor, tag="logreg")
    return model, report


def train_single_ffnn(
    corpus,
    extractor: FeatureExtractor,
    seed: int = 0,
    eval_corpus=None,
    settings: TrainSettings | None = None,
):
    """Two-hidden-layer FFNN with sigmoid output."""
    settings = settings or TrainSettings()
    model = MlpClassifier(hidden=settings.hidden, seed=seed, layout=extractor.layout)
    _fit_on_corpus(model, corpus, extractor, settings)
    report = None
    if eval_corpus is not None:
        report = evaluate_model(model, eval_corpus, extractor, tag="ffnn")
    return model, report


def partition_by_band(corpus: Corpus, attribute: str) -> tuple[Corpus, Corpus]:
    """Split accounts by their band for one attribute (band order of BANDS)."""
    if attribute not in BANDS:
        raise UsageError(f"unknown attribute {attribute!r}")
    first, second = BANDS[attribute]
    per_band = {first: [], second: []}
    for aid in sorted(corpus.accounts):
        account = corpus.accounts[aid]
        if account.profile is None:
            raise MissingProfile(f"account {aid} has no profile assigned")
        per_band[account.profile.band(attribute)].append(aid)
    return corpus.subset(per_band[first]), corpus.subset(per_band[second])


class MultipleModel:
    """One FFNN per band of a single attribute; items route by their band."""

    def __init__(self, attribute: str, models: dict[str, MlpClassifier]):
        self.attribute = attribute
        self.models = models

    def tweet_probs(self, corpus, extractor) -> dict[str, float]:
        order = sorted(corpus.tweets)
        x = extractor.matrix(corpus, order)
        out = np.empty(len(order))
        for band, model in self.models.items():
            idx = [
                i
                for i, t in enumerate(order)
                if _account_band(corpus, t, self.attribute) == band
            ]
            if idx:
                out[np.array(idx)] = model.predict_proba(x[idx])
        return dict(zip(order, out.tolist()))

    def state(self):
        arrays = {}
        meta = {"kind": "multiple", "attribute": self.attribute, "bands": {}}
        for band, model in self.models.items():
            meta["bands"][band] = model.meta()
            for k, v in model.state_arrays().items():
                arrays[f"band.{band}.{k}"] = v
        return arrays, meta

    def save(self, path):
        arrays, meta = self.state()
        save_params(path, arrays, meta)

    @classmethod
    def load(cls, path) -> "MultipleModel":
        arrays, meta = load_params(path)
        models = {}
        for band, sub_meta in meta["bands"].items():
            prefix = f"band.{band}."
            sub = {k[len(prefix):]: v for k, v in arrays.items() if k.startswith(prefix)}
            models[band] = MlpClassifier.from_state(sub_meta, sub)
        return cls(meta["attribute"], models)


def _account_band(corpus, tweet_id, attribute):
    account = corpus.accounts[corpus.tweets[tweet_id].account_id]
    if account.profile is None:
        raise MissingProfile(f"account {account.account_id} has no profile assigned")
    return account.profile.band(attribute)


def train_multiple(
    corpus,
    attribute: str,
    extractor: FeatureExtractor,
    seed: int = 0,
    eval_corpus=None,
    settings: TrainSettings | None = None,
):
    """Per-band FFNNs for one attribute; evaluation routes by band."""
    settings = settings or TrainSettings()
    parts = dict(zip(BANDS[attribute], partition_by_band(corpus, attribute)))
    models = {}
    for band, sub in parts.items():
        if not sub.accounts:
            raise EmptyPartition(f"no accounts in band {attribute}={band}")
        model = MlpClassifier(hidden=settings.hidden, seed=seed, layout=extractor.layout)
        _fit_on_corpus(model, sub, extractor, settings)
        models[band] = model
    multiple = MultipleModel(attribute, models)
    report = None
    if eval_corpus is not None:
        report = evaluate_model(
            multiple, eval_corpus, extractor, tag=f"multiple-{attribute}"
        )
    return multiple, report


# -- the full eight-branch architecture ------------------------------------------


STACK_DIM = 16  # 4 branch probabilities + 4 band one-hot pairs + 4 confidences


class EnsembleModel:
    """Eight (attribute, band) branch FFNNs plus a stacked final classifier."""

    def __init__(
        self,
        branches: dict[str, MlpClassifier],
        final: MlpClassifier,
        final_variant: str,
        profile_source: str = "oracle",
        threshold: float = DEFAULT_THRESHOLD,
    ):
        missing = [k.tag for k in all_branch_keys() if k.tag not in branches]
        if missing:
            raise EmptyPartition(f"branches missing for {missing}")
        self.branches = branches
        self.final = final
        self.final_variant = final_variant
        self.profile_source = profile_source
        self.threshold = threshold

    def branch_probs(self, corpus, x, order) -> np.ndarray:
        """[n, 4] probabilities from each item's own four band branches."""
        out = np.empty((len(order), len(ATTRIBUTES)))
        for j, attr in enumerate(ATTRIBUTES):
            for band in BANDS[attr]:
                idx = [
                    i
                    for i, t in enumerate(order)
                    if _account_band(corpus, t, attr) == band
                ]
                if idx:
                    model = self.branches[BranchKey(attr, band).tag]
                    out[np.array(idx), j] = model.predict_proba(x[idx])
        return out

    def stack_features(self, corpus, order, probs: np.ndarray) -> np.ndarray:
        """[n, 16] rows: branch probs, band one-hots, confidences."""
        n = len(order)
        out = np.empty((n, STACK_DIM))
        out[:, : len(ATTRIBUTES)] = probs
        col = len(ATTRIBUTES)
        for attr in ATTRIBUTES:
            first, _ = BANDS[attr]
            for i, t in enumerate(order):
                is_first = _account_band(corpus, t, attr) == first
                out[i, col] = 1.0 if is_first else 0.0
                out[i, col + 1] = 0.0 if is_first else 1.0
            col += 2
        for attr in ATTRIBUTES:
            for i, t in enumerate(order):
                account = corpus.accounts[corpus.tweets[t].account_id]
                out[i, col] = account.profile.confidence(attr)
            col += 1
        return out

    def tweet_probs(self, corpus, extractor) -> dict[str, float]:
        order = sorted(corpus.tweets)
        x = extractor.matrix(corpus, order)
        probs = self.branch_probs(corpus, x, order)
        stack = self.stack_features(corpus, order, probs)
        finals = self.final.predict_proba(stack)
        return dict(zip(order, finals.tolist()))

    def tweet_branch_probs(self, corpus, extractor) -> dict[str, dict[str, float]]:
        """Per-tweet map of consulted branch tag -> probability."""
        order = sorted(corpus.tweets)
        x = extractor.matrix(corpus, order)
        probs = self.branch_probs(corpus, x, order)
        out = {}
        for i, t in enumerate(order):
            per = {}
            for j, attr in enumerate(ATTRIBUTES):
                band = _account_band(corpus, t, attr)
                per[BranchKey(attr, band).tag] = float(probs[i, j])
            out[t] = per
        return out

    def state(self):
        arrays = {}
        meta = {
            "kind": "ensemble",
            "final_variant": self.final_variant,
            "profile_source": self.profile_source,
            "threshold": self.threshold,
            "branches": {},
            "final": self.final.meta(),
        }
        for tag, model in self.branches.items():
            meta["branches"][tag] = model.meta()
            for k, v in model.state_arrays().items():
                arrays[f"branch.{tag}.{k}"] = v
        for k, v in self.final.state_arrays().items():
            arrays[f"final.{k}"] = v
        return arrays, meta

    def save(self, path):
        arrays, meta = self.state()
        save_params(path, arrays, meta)

    @classmethod
    def load(cls, path) -> "EnsembleModel":
        arrays, meta = load_params(path)
        branches = {}
        for tag, sub_meta in meta["branches"].items():
            prefix = f"branch.{tag}."
            sub = {k[len(prefix):]: v for k, v in arrays.items() if k.startswith(prefix)}
            branches[tag] = MlpClassifier.from_state(sub_meta, sub)
        final_arrays = {
            k[len("final."):]: v for k, v in arrays.items() if k.startswith("final.")
        }
        final = MlpClassifier.from_state(meta["final"], final_arrays)
        return cls(
            branches,
            final,
            meta["final_variant"],
            meta.get("profile_source", "oracle"),
            meta.get("threshold", DEFAULT_THRESHOLD),
        )


def _train_branches(corpus, extractor, seed, settings) -> dict[str, MlpClassifier]:
    branches = {}
    for key in all_branch_keys():
        sub = _band_subset(corpus, key)
        if not sub.accounts:
            raise EmptyPartition(f"no accounts in branch {key.tag}")
        model = MlpClassifier(hidden=settings.hidden, seed=seed, layout=extractor.layout)
        try:
            _fit_on_corpus(model, sub, extractor, settings)
        except SingleClassTrainingSet:
            raise SingleClassTrainingSet(
                f"branch {key.tag} sub-corpus holds a single class"
            ) from None
        branches[key.tag] = model
    return branches


def _band_subset(corpus, key: BranchKey) -> Corpus:
    ids = []
    for aid in sorted(corpus.accounts):
        account = corpus.accounts[aid]
        if account.profile is None:
            raise MissingProfile(f"account {aid} has no profile assigned")
        if account.profile.band(key.attribute) == key.band:
            ids.append(aid)
    return corpus.subset(ids)


def train_full(
    corpus,
    extractor: FeatureExtractor,
    final_variant: str = "ffnn",
    seed: int = 0,
    eval_corpus=None,
    settings: TrainSettings | None = None,
    profile_source: str = "oracle",
):
    """Train the full architecture with 2-fold cross-fitted stack features.

    Stage 1 fits the eight deployed branches on the whole training corpus.
    Stage 2 builds each item's stack features from branches trained on the
    complementary account fold, then fits the final classifier on those
    out-of-fold rows; no branch supplies a stack feature for an item it was
    trained on.
    """
    if final_variant not in FINAL_VARIANTS:
        raise UsageError(f"final_variant must be one of {FINAL_VARIANTS}")
    settings = settings or TrainSettings()

    branches = _train_branches(corpus, extractor, seed, settings)

    rng = np.random.default_rng(seed)
    account_ids = sorted(corpus.accounts)
    perm = rng.permutation(len(account_ids))
    fold_of = {account_ids[i]: int(perm[i] % 2) for i in range(len(account_ids))}
    stack_rows = []
    stack_labels = []
    for fold in (0, 1):
        train_part = corpus.subset([a for a in account_ids if fold_of[a] != fold])
        apply_part = corpus.subset([a for a in account_ids if fold_of[a] == fold])
        if not train_part.accounts or not apply_part.accounts:
            raise EmptyPartition("a cross-fitting fold is empty; corpus too small")
        try:
            # fold branches see half the accounts; extra epochs keep their
            # probability sharpness close to the deployed branches so the
            # final classifier trains on the distribution it will consume
            fold_settings = replace(settings, epochs=int(settings.epochs * 1.5))
            fold_branches = _train_branches(
                train_part, extractor, seed + 101 + fold, fold_settings
            )
        except (EmptyPartition, SingleClassTrainingSet) as exc:
            raise type(exc)(f"cross-fitting fold {fold}: {exc}") from None
        helper = EnsembleModel.__new__(EnsembleModel)
        helper.branches = fold_branches
        order = sorted(apply_part.tweets)
        x = extractor.matrix(apply_part, order)
        probs = helper.branch_probs(apply_part, x, order)
        stack_rows.append(helper.stack_features(apply_part, order, probs))
        stack_labels.append(extractor.labels(apply_part, order))

    stack_x = np.vstack(stack_rows)
    stack_y = np.concatenate(stack_labels)
    hidden = settings.final_hidden if final_variant == "ffnn" else ()
    final = MlpClassifier(
        hidden=hidden,
        seed=seed + 7,
        optimizer="sgd" if final_variant == "sgd" else "adam",
    )
    final.fit(
        stack_x,
        stack_y,
        epochs=settings.final_epochs,
        lr=0.1 if final_variant == "sgd" else settings.lr,
        batch_size=settings.batch_size,
        l2=settings.final_l2,
    )

    model = EnsembleModel(branches, final, final_variant, profile_source)
    report = None
    if eval_corpus is not None:
        report = evaluate_model(
            model, eval_corpus, extractor, tag=f"full-{final_variant}"
        )
    return model, report


# -- prediction objects ------------------------------------------------------------


def predict(model, corpus, extractor, unit: str = "tweet", threshold: float = DEFAULT_THRESHOLD) -> list[Prediction]:
    """Predictions for every item in the corpus at the chosen unit."""
    probs = tweet_scores(model, corpus, extractor)
    branch = (
        model.tweet_branch_probs(corpus, extractor)
        if isinstance(model, EnsembleModel)
        else None
    )
    preds = []
    if unit == "tweet":
        for t in sorted(corpus.tweets):
            preds.append(
                Prediction(
                    item_id=t,
                    prob_bot=probs[t],
                    label="bot" if probs[t] >= threshold else "human",
                    unit="tweet",
                    branch_probs=None if branch is None else branch[t],
                )
            )
        return preds
    if unit == "account":
        acc = account_scores(probs, corpus)
        for aid in sorted(corpus.accounts):
            per = None
            if branch is not None:
                tweet_ids = sorted(corpus.accounts[aid].tweet_ids)
                per = {
                    tag: float(np.mean([branch[t][tag] for t in tweet_ids]))
                    for tag in branch[tweet_ids[0]]
                }
            preds.append(
                Prediction(
                    item_id=aid,
                    prob_bot=acc[aid],
                    label="bot" if acc[aid] >= threshold else "human",
                    unit="account",
                    branch_probs=per,
                )
            )
        return preds
    raise UsageError(f"unknown unit {unit!r}")
