"""Per-account profile attributes and their estimation.

Four binary attributes are read off a user's posted text: age band, gender,
education, personality. Estimation runs per tweet behind a pluggable source
(oracle columns, a trained heuristic, or an external-service adapter stub) and
is aggregated to one profile per account by averaging the per-tweet
distributions.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyEstimateList,
    MissingOracleLabels,
    UntrainedHeuristic,
)

ATTRIBUTES = ("age", "gender", "education", "personality")

# Band order is significant: distributions are (first, second) and exact ties
# resolve to the first-listed band.
BANDS: dict[str, tuple[str, str]] = {
    "age": ("under25", "over25"),
    "gender": ("male", "female"),
    "education": ("educated", "not_educated"),
    "personality": ("introvert", "extrovert"),
}

_NORM_TOL = 1e-9


def validate_band(attribute: str, band: str) -> str:
    if attribute not in BANDS:
        raise ValueError(f"unknown attribute {attribute!r}")
    if band not in BANDS[attribute]:
        raise ValueError(f"unknown band {band!r} for attribute {attribute!r}")
    return band


@dataclass(frozen=True)
class ProfileVector:
    """Chosen band plus aggregated confidence (in [0.5, 1]) per attribute."""

    bands: dict[str, str]
    confidences: dict[str, float]

    def __post_init__(self):
        for attr in ATTRIBUTES:
            validate_band(attr, self.bands[attr])
            c = self.confidences[attr]
            if not 0.5 <= c <= 1.0 + 1e-12:
                raise ValueError(f"confidence for {attr} out of [0.5, 1]: {c}")

    def band(self, attribute: str) -> str:
        return self.bands[attribute]

    def confidence(self, attribute: str) -> float:
        return self.confidences[attribute]

    def distribution(self, attribute: str) -> tuple[float, float]:
        """Two-band distribution implied by the stored band and confidence."""
        first, _ = BANDS[attribute]
        c = self.confidences[attribute]
        if self.bands[attribute] == first:
            return (c, 1.0 - c)
        return (1.0 - c, c)


@dataclass(frozen=True)
class TweetProfileEstimate:
    """Normalized two-band distribution per attribute, for one tweet."""

    distributions: dict[str, tuple[float, float]]

    def __post_init__(self):
        for attr in ATTRIBUTES:
            p = self.distributions[attr]
            if min(p) < 0 or abs(sum(p) - 1.0) > _NORM_TOL:
                raise ValueError(f"distribution for {attr} not normalized: {p}")


def aggregate_account_profile(estimates: list[TweetProfileEstimate]) -> ProfileVector:
    """Mean the per-tweet distributions; band = argmax, ties to the first band."""
    if not estimates:
        raise EmptyEstimateList("cannot aggregate zero tweet estimates")
    bands = {}
    confidences = {}
    for attr in ATTRIBUTES:
        mean0 = sum(e.distributions[attr][0] for e in estimates) / len(estimates)
        mean1 = sum(e.distributions[attr][1] for e in estimates) / len(estimates)
        first, second = BANDS[attr]
        # max of a normalized pair is >= 0.5 up to rounding; clamp the dust
        if mean0 >= mean1:
            bands[attr] = first
            confidences[attr] = max(0.5, mean0)
        else:
            bands[attr] = second
            confidences[attr] = max(0.5, mean1)
    return ProfileVector(bands=bands, confidences=confidences)


class ProfileSource(abc.ABC):
    """Strategy interface for per-tweet profile estimation."""

    name = "abstract"

    @abc.abstractmethod
    def estimate(self, tweet, account) -> TweetProfileEstimate:
        raise NotImplementedError


class OracleSource(ProfileSource):
    """Reads the profile columns stored on the tweet's account."""

    name = "oracle"

    def estimate(self, tweet, account) -> TweetProfileEstimate:
        if account.profile is None:
            raise MissingOracleLabels(
                f"account {account.account_id} has no stored profile columns"
            )
        return TweetProfileEstimate(
            distributions={a: account.profile.distribution(a) for a in ATTRIBUTES}
        )


class HeuristicSource(ProfileSource):
    """Four independent logistic classifiers over the tweet vector.

    Trained from stored profile columns; gives the pipeline a self-contained
    profile path on corpora where oracle columns exist only at train time.
    """

    name = "heuristic"

    def __init__(self, extractor):
        self.extractor = extractor
        self.models: dict[str, object] = {}

    def fit(self, corpus, seed: int = 0, epochs: int = 60, lr: float = 0.05):
        from .ensemble import MlpClassifier

        x = self.extractor.tweet_vectors(corpus)
        order = sorted(corpus.tweets)
        for k, attr in enumerate(ATTRIBUTES):
            second = BANDS[attr][1]
            y = np.array(
                [
                    1.0
                    if _oracle_band(corpus, tid, attr) == second
                    else 0.0
                    for tid in order
                ]
            )
            model = MlpClassifier(hidden=(), seed=seed + k)
            model.fit(x, y, epochs=epochs, lr=lr)
            self.models[attr] = model
        return self

    def estimate(self, tweet, account) -> TweetProfileEstimate:
        if not self.models:
            raise UntrainedHeuristic("heuristic profile source has not been fit")
        x = self.extractor.tweet_vector(tweet)[None, :]
        dists = {}
        for attr in ATTRIBUTES:
            p_second = float(self.models[attr].predict_proba(x)[0])
            dists[attr] = (1.0 - p_second, p_second)
        return TweetProfileEstimate(distributions=dists)


def _oracle_band(corpus, tweet_id, attribute):
    account = corpus.accounts[corpus.tweets[tweet_id].account_id]
    if account.profile is None:
        raise MissingOracleLabels(
            f"account {account.account_id} has no stored profile columns"
        )
    return account.profile.band(attribute)


@dataclass(frozen=True)
class ProfileRequest:
    """Wire shape for an external profiling service (documentation only)."""

    tweet_id: str
    text: str


@dataclass(frozen=True)
class ProfileResponse:
    """Expected reply: one confidence pair per attribute, each summing to 1."""

    tweet_id: str
    distributions: dict[str, tuple[float, float]]


class ExternalAdapterSource(ProfileSource):
    """Interface stub for a remote profiling API; carries no network code."""

    name = "external"

    def estimate(self, tweet, account) -> TweetProfileEstimate:
        raise NotImplementedError(
            "external profiling adapter is an interface only; "
            "implement estimate() against ProfileRequest/ProfileResponse"
        )


def estimate_tweet_profile(tweet, account, source: ProfileSource) -> TweetProfileEstimate:
    return source.estimate(tweet, account)


def assign_profiles(corpus, source: ProfileSource):
    """Fill every account's profile by aggregating its per-tweet estimates."""
    for account in corpus.accounts.values():
        estimates = [
            source.estimate(corpus.tweets[tid], account) for tid in account.tweet_ids
        ]
        account.profile = aggregate_account_profile(estimates)
    return corpus
