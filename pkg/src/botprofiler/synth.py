"""Seeded synthetic corpus generator with controllable structure.

Two knobs drive the experiments. Separability (delta) scales the global bot
signature: bots reuse templated promo text, insert shortened spam URLs, and
push promoter hashtags. Band conditioning (kappa) scales lexical markers that
flip meaning across profile bands: a marker token appears on bot tweets in one
band and on human tweets in the other, so it carries no marginal class signal
but is decisive once the band is known. At delta=0 and kappa=0 bot and human
text come from the identical generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import AccountMetadata, AccountRecord, BotClass, Corpus, TweetRecord
from .errors import InvalidConfig
from .preprocess import count_urls
from .profiles import ATTRIBUTES, BANDS, ProfileVector

PROMO_WORDS = (
    "win", "free", "followers", "click", "now", "buy", "deal", "offer",
    "visit", "amazing", "results", "discount", "boost", "instant", "cash",
)

BOT_CLASS_POOL = (
    BotClass.SOCIAL_SPAM_1,
    BotClass.SOCIAL_SPAM_2,
    BotClass.SOCIAL_SPAM_3,
    BotClass.TRADITIONAL_SPAM,
    BotClass.FAKE_FOLLOWER,
)

MARKER_POOL_SIZE = 4

# Band conditioning is strongest for gender, then age (mirrors the reported
# ordering of the multiple-classification results); keys follow ATTRIBUTES.
MARKER_WEIGHTS = {"age": 0.7, "gender": 1.0, "education": 0.5, "personality": 0.5}


@dataclass
class GenConfig:
    n_accounts: int = 200
    tweets_per_account: tuple[int, int] = (3, 6)
    bot_fraction: float = 0.5
    separability: float = 1.0  # delta
    band_conditioning: float = 0.0  # kappa
    band_priors: dict[str, float] = field(
        default_factory=lambda: {a: 0.5 for a in ATTRIBUTES}
    )
    vocab_size: int = 120
    seed: int = 0
    bot_classes: tuple[BotClass, ...] = BOT_CLASS_POOL
    with_metadata: bool = True
    marker_rate: float = 0.85  # per-attribute emission rate at kappa = 1

    def validate(self) -> "GenConfig":
        if self.n_accounts < 2:
            raise InvalidConfig("n_accounts must be >= 2")
        lo, hi = self.tweets_per_account
        if lo < 1 or hi < lo:
            raise InvalidConfig("tweets_per_account must be a valid (lo, hi) range")
        for name, value in (
            ("bot_fraction", self.bot_fraction),
            ("separability", self.separability),
            ("band_conditioning", self.band_conditioning),
            ("marker_rate", self.marker_rate),
        ):
            if not 0.0 <= value <= 1.0:
                raise InvalidConfig(f"{name} must lie in [0, 1]")
        for attr in ATTRIBUTES:
            p = self.band_priors.get(attr)
            if p is None or not 0.0 <= p <= 1.0:
                raise InvalidConfig(f"band prior for {attr} must lie in [0, 1]")
        if self.vocab_size < 20:
            raise InvalidConfig("vocab_size must be >= 20")
        if not self.bot_classes:
            raise InvalidConfig("bot_classes must not be empty")
        return self


def _marker(attr_idx: int, band_idx: int, j: int) -> str:
    return f"sig{attr_idx}{band_idx}x{j}"


def _human_tweet(rng, config: GenConfig, word_probs) -> str:
    n = int(rng.integers(6, 13))
    words = [f"w{int(k):03d}" for k in rng.choice(config.vocab_size, size=n, p=word_probs)]
    if rng.random() < 0.12:
        words.append(f"#topic{int(rng.integers(8))}")
    if rng.random() < 0.08:
        words.append(f"http://example.com/p{int(rng.integers(999))}")
    if rng.random() < 0.15:
        words.insert(0, f"@user{int(rng.integers(200))}")
    text = " ".join(words)
    if rng.random() < 0.10:
        text = f"RT @user{int(rng.integers(200))}: {text}"
    return text


def _signature_tweet(rng, templates) -> str:
    text = templates[int(rng.integers(len(templates)))]
    if rng.random() < 0.9:
        tail = "".join(rng.choice(list("abcdefghij0123456789"), size=8))
        text += f" http://t.co/{tail}"
    if rng.random() < 0.7:
        text += f" #promo{int(rng.integers(5))}"
    if rng.random() < 0.3:
        text = f"RT @user{int(rng.integers(200))}: {text}"
    return text


def _append_markers(rng, config: GenConfig, words_text: str, bands: dict, is_bot: bool) -> str:
    """Band-flipped marker tokens: bots mark their own band, humans the other."""
    rate = config.band_conditioning * config.marker_rate
    if rate <= 0.0:
        return words_text
    extra = []
    for a_idx, attr in enumerate(ATTRIBUTES):
        if rng.random() < rate * MARKER_WEIGHTS[attr]:
            b_idx = BANDS[attr].index(bands[attr])
            if not is_bot:
                b_idx = 1 - b_idx
            extra.append(_marker(a_idx, b_idx, int(rng.integers(MARKER_POOL_SIZE))))
    if not extra:
        return words_text
    return words_text + " " + " ".join(extra)


def generate(config: GenConfig) -> Corpus:
    """Deterministic corpus with ground-truth labels and profile columns."""
    config.validate()
    root = np.random.default_rng(np.random.SeedSequence((config.seed, 0)))
    n = config.n_accounts
    n_bots = min(n, int(np.floor(n * config.bot_fraction + 0.5)))
    bot_slots = set(root.permutation(n)[:n_bots].tolist())

    word_probs = 1.0 / (np.arange(config.vocab_size) + 3.0)
    word_probs /= word_probs.sum()

    accounts: dict[str, AccountRecord] = {}
    tweets: dict[str, TweetRecord] = {}
    bot_rank = 0
    for idx in range(n):
        rng = np.random.default_rng(np.random.SeedSequence((config.seed, 1, idx)))
        account_id = f"a{idx:05d}"
        is_bot = idx in bot_slots
        if is_bot:
            bot_class = config.bot_classes[bot_rank % len(config.bot_classes)]
            bot_rank += 1
        else:
            bot_class = BotClass.GENUINE

        bands = {
            attr: BANDS[attr][0] if rng.random() < config.band_priors[attr] else BANDS[attr][1]
            for attr in ATTRIBUTES
        }
        confidences = {
            attr: float(0.5 + 0.5 * rng.beta(8.0, 2.0)) for attr in ATTRIBUTES
        }
        profile = ProfileVector(bands=bands, confidences=confidences)

        templates = []
        if is_bot:
            for _ in range(int(rng.integers(2, 4))):
                length = int(rng.integers(5, 9))
                words = rng.choice(len(PROMO_WORDS), size=length)
                templates.append(" ".join(PROMO_WORDS[w] for w in words))

        lo, hi = config.tweets_per_account
        n_tweets = int(rng.integers(lo, hi + 1))
        tweet_ids = []
        raw_texts = []
        for k in range(n_tweets):
            if is_bot and rng.random() < config.separability:
                text = _signature_tweet(rng, templates)
            else:
                text = _human_tweet(rng, config, word_probs)
            text = _append_markers(rng, config, text, bands, is_bot)
            tweet_id = f"t{idx:05d}_{k:03d}"
            tweet_ids.append(tweet_id)
            raw_texts.append(text)
            tweets[tweet_id] = TweetRecord(
                tweet_id=tweet_id, account_id=account_id, raw_text=text
            ).run_preprocess()

        metadata = None
        if config.with_metadata:
            metadata = AccountMetadata(
                follower_count=int(rng.lognormal(5.0, 1.2)),
                friends_count=int(rng.lognormal(5.5, 1.0)),
                retweet_count=int(rng.lognormal(3.0, 1.0)),
                reply_count=int(rng.lognormal(2.5, 1.0)),
                hashtag_count=sum(t.count("#") for t in raw_texts),
                url_count=sum(count_urls(t) for t in raw_texts),
            )

        accounts[account_id] = AccountRecord(
            account_id=account_id,
            bot_class=bot_class,
            metadata=metadata,
            profile=profile,
            tweet_ids=tweet_ids,
        )

    return Corpus(accounts=accounts, tweets=tweets).validate()
