"""Feature assembly: tweet vectors plus surface, metadata, and profile blocks.

A feature row is laid out pre-mix: the contextual part keeps one block per LM
layer so classifiers can mix them (softmax-weighted) as part of their own
forward pass. The layout descriptor records which blocks are active and all
dimensions; a trained model refuses rows with a different layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MissingField, MissingProfile, ShapeMismatch
from .profiles import ATTRIBUTES, BANDS

SURFACE_DIM = 6
METADATA_DIM = 6


@dataclass(frozen=True)
class FeatureConfig:
    """Which feature blocks are active and how context layers are mixed."""

    use_metadata: bool = False
    profile_attributes: tuple[str, ...] = ()
    mix_mode: str = "uniform"  # uniform | fixed | learned
    mix_scalars: tuple[float, ...] | None = None

    def __post_init__(self):
        for attr in self.profile_attributes:
            if attr not in ATTRIBUTES:
                raise ShapeMismatch(f"unknown profile attribute {attr!r}")
        if self.mix_mode not in ("uniform", "fixed", "learned"):
            raise ShapeMismatch(f"unknown mix_mode {self.mix_mode!r}")
        if self.mix_mode == "fixed" and self.mix_scalars is None:
            raise ShapeMismatch("fixed mix_mode requires mix_scalars")


@dataclass(frozen=True)
class FeatureLayout:
    """Block structure of a feature row; fixed per trained model."""

    static_dim: int
    ctx_blocks: int
    ctx_dim: int  # 2 * hidden, per block
    surface_dim: int
    metadata_dim: int
    profile_attributes: tuple[str, ...]
    mix_mode: str
    mix_scalars: tuple[float, ...] | None = None

    @property
    def profile_dim(self) -> int:
        return 3 * len(self.profile_attributes)  # one-hot pair + confidence

    @property
    def pre_mix_dim(self) -> int:
        return (
            self.static_dim
            + self.ctx_blocks * self.ctx_dim
            + self.surface_dim
            + self.metadata_dim
            + self.profile_dim
        )

    @property
    def post_mix_dim(self) -> int:
        return self.pre_mix_dim - (self.ctx_blocks - 1) * self.ctx_dim

    @property
    def ctx_span(self) -> tuple[int, int]:
        start = self.static_dim
        return start, start + self.ctx_blocks * self.ctx_dim

    def describe(self) -> list[tuple[str, int]]:
        blocks = [("static", self.static_dim)]
        blocks += [(f"ctx_layer_{k}", self.ctx_dim) for k in range(self.ctx_blocks)]
        blocks.append(("surface", self.surface_dim))
        if self.metadata_dim:
            blocks.append(("metadata", self.metadata_dim))
        for attr in self.profile_attributes:
            blocks.append((f"profile_{attr}", 3))
        return blocks

    def to_dict(self) -> dict:
        return {
            "static_dim": self.static_dim,
            "ctx_blocks": self.ctx_blocks,
            "ctx_dim": self.ctx_dim,
            "surface_dim": self.surface_dim,
            "metadata_dim": self.metadata_dim,
            "profile_attributes": list(self.profile_attributes),
            "mix_mode": self.mix_mode,
            "mix_scalars": None if self.mix_scalars is None else list(self.mix_scalars),
        }

    @classmethod
    def from_dict(cls, d) -> "FeatureLayout":
        return cls(
            static_dim=d["static_dim"],
            ctx_blocks=d["ctx_blocks"],
            ctx_dim=d["ctx_dim"],
            surface_dim=d["surface_dim"],
            metadata_dim=d["metadata_dim"],
            profile_attributes=tuple(d["profile_attributes"]),
            mix_mode=d["mix_mode"],
            mix_scalars=None if d["mix_scalars"] is None else tuple(d["mix_scalars"]),
        )


class FeatureExtractor:
    """Turns (tweet, account) pairs into feature rows under one layout."""

    def __init__(self, lm, static_table, config: FeatureConfig | None = None):
        self.lm = lm
        self.table = static_table
        self.config = config or FeatureConfig()
        self.layout = FeatureLayout(
            static_dim=static_table.dim,
            ctx_blocks=lm.config.layers + 1,
            ctx_dim=2 * lm.config.hidden_dim,
            surface_dim=SURFACE_DIM,
            metadata_dim=METADATA_DIM if self.config.use_metadata else 0,
            profile_attributes=self.config.profile_attributes,
            mix_mode=self.config.mix_mode,
            mix_scalars=self.config.mix_scalars,
        )
        # tweet text is immutable after load, so static+context rows are
        # cached per tweet id; profile/metadata columns are always fresh
        self._text_cache: dict[str, np.ndarray] = {}

    # -- text blocks -------------------------------------------------------

    def _static_rows(self, token_lists) -> np.ndarray:
        out = np.zeros((len(token_lists), self.table.dim))
        for i, tokens in enumerate(token_lists):
            if tokens:
                out[i] = np.mean([self.table.lookup(t) for t in tokens], axis=0)
        return out

    def _text_rows(self, corpus, order) -> np.ndarray:
        """[n, static + ctx_blocks * ctx_dim] rows, cached per tweet id."""
        missing = [t for t in order if t not in self._text_cache]
        if missing:
            token_lists = [corpus.tweets[t].tokens for t in missing]
            static = self._static_rows(token_lists)
            blocks = self.lm.pooled_context_blocks(
                [self.lm.vocab.encode(toks) for toks in token_lists]
            )
            rows = np.concatenate([static, blocks.reshape(len(missing), -1)], axis=1)
            for i, t in enumerate(missing):
                self._text_cache[t] = rows[i]
        return np.stack([self._text_cache[t] for t in order])

    def tweet_vectors(self, corpus, tweet_ids=None) -> np.ndarray:
        """Spec tweet vectors [n, static + ctx] with uniform/fixed mixing."""
        order = sorted(corpus.tweets) if tweet_ids is None else list(tweet_ids)
        lay = self.layout
        text = self._text_rows(corpus, order)
        static = text[:, : lay.static_dim]
        c0, c1 = lay.ctx_span
        blocks = text[:, c0:c1].reshape(len(order), lay.ctx_blocks, lay.ctx_dim)
        w = self.lm.mix_weights(
            None if self.config.mix_scalars is None else list(self.config.mix_scalars)
        )
        ctx = np.einsum("k,nkd->nd", w, blocks)
        return np.concatenate([static, ctx], axis=1)

    def tweet_vector(self, tweet) -> np.ndarray:
        """One spec tweet vector (static + mixed contextual) for one tweet."""
        from .embeddings import embed_tweet

        scalars = None if self.config.mix_scalars is None else list(self.config.mix_scalars)
        return embed_tweet(tweet.tokens, self.table, self.lm, scalars)

    # -- full rows ----------------------------------------------------------

    def matrix(self, corpus, tweet_ids=None) -> np.ndarray:
        """Pre-mix feature matrix over the given tweets (sorted ids default)."""
        order = sorted(corpus.tweets) if tweet_ids is None else list(tweet_ids)
        n = len(order)
        lay = self.layout
        out = np.zeros((n, lay.pre_mix_dim))
        c0, c1 = lay.ctx_span
        out[:, :c1] = self._text_rows(corpus, order)
        col = c1
        for i, tid in enumerate(order):
            tweet = corpus.tweets[tid]
            s = tweet.surface
            out[i, col : col + SURFACE_DIM] = (
                s.url_count,
                s.hashtag_count,
                s.mention_count,
                float(s.is_retweet),
                s.token_count,
                s.char_count,
            )
        col += SURFACE_DIM
        if lay.metadata_dim:
            for i, tid in enumerate(order):
                account = corpus.accounts[corpus.tweets[tid].account_id]
                if account.metadata is None:
                    raise MissingField(
                        f"account {account.account_id} has no metadata but "
                        "use_metadata is set"
                    )
                out[i, col : col + METADATA_DIM] = np.log1p(account.metadata.as_vector())
            col += METADATA_DIM
        for attr in lay.profile_attributes:
            first, _ = BANDS[attr]
            for i, tid in enumerate(order):
                account = corpus.accounts[corpus.tweets[tid].account_id]
                if account.profile is None:
                    raise MissingProfile(
                        f"account {account.account_id} has no profile assigned"
                    )
                is_first = account.profile.band(attr) == first
                out[i, col + 0] = 1.0 if is_first else 0.0
                out[i, col + 1] = 0.0 if is_first else 1.0
                out[i, col + 2] = account.profile.confidence(attr)
            col += 3
        return out

    def labels(self, corpus, tweet_ids=None) -> np.ndarray:
        order = sorted(corpus.tweets) if tweet_ids is None else list(tweet_ids)
        return np.array(
            [
                1.0 if corpus.accounts[corpus.tweets[t].account_id].is_bot else 0.0
                for t in order
            ]
        )
