"""Corpus data model, CSV/JSONL ingestion, validation, and splitting.

A corpus is a pair of keyed collections: accounts (with bot class, optional
metadata counts, optional profile) and tweets (raw text plus preprocessed
fields). Files are one row/object per tweet; account-level fields repeat on
each row and may be left empty on rows that merely reference an account
defined elsewhere in the file.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import preprocess
from .errors import (
    DanglingReference,
    DuplicateId,
    InsufficientAccounts,
    InvalidConfig,
    MalformedRow,
    MissingField,
)
from .preprocess import SurfaceFeatures
from .profiles import ATTRIBUTES, BANDS, ProfileVector


class BotClass(enum.Enum):
    GENUINE = "genuine"
    SOCIAL_SPAM_1 = "social_spam_1"
    SOCIAL_SPAM_2 = "social_spam_2"
    SOCIAL_SPAM_3 = "social_spam_3"
    TRADITIONAL_SPAM = "traditional_spam"
    FAKE_FOLLOWER = "fake_follower"

    @property
    def is_bot(self) -> bool:
        return self is not BotClass.GENUINE


METADATA_FIELDS = (
    "follower_count",
    "friends_count",
    "retweet_count",
    "reply_count",
    "hashtag_count",
    "url_count",
)

PROFILE_BAND_COLUMNS = ("age_band", "gender", "education", "personality")
PROFILE_CONF_COLUMNS = ("conf_age", "conf_gender", "conf_education", "conf_personality")

CSV_HEADER = (
    "tweet_id",
    "account_id",
    "bot_class",
    "raw_text",
    *METADATA_FIELDS,
    *PROFILE_BAND_COLUMNS,
    *PROFILE_CONF_COLUMNS,
)


@dataclass
class AccountMetadata:
    """Original dataset counts for one account; all nonnegative."""

    follower_count: int
    friends_count: int
    retweet_count: int
    reply_count: int
    hashtag_count: int
    url_count: int

    def __post_init__(self):
        for name in METADATA_FIELDS:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, f) for f in METADATA_FIELDS], dtype=np.float64)


@dataclass
class TweetRecord:
    tweet_id: str
    account_id: str
    raw_text: str
    cleaned_text: str = ""
    tokens: list[str] = field(default_factory=list)
    surface: SurfaceFeatures | None = None

    def run_preprocess(self):
        self.cleaned_text = preprocess.clean_text(self.raw_text)
        self.tokens = preprocess.tokenize(self.cleaned_text)
        self.surface = preprocess.surface_features(self.raw_text)
        return self


@dataclass
class AccountRecord:
    account_id: str
    bot_class: BotClass
    metadata: AccountMetadata | None = None
    profile: ProfileVector | None = None
    tweet_ids: list[str] = field(default_factory=list)

    @property
    def is_bot(self) -> bool:
        return self.bot_class.is_bot


@dataclass
class Corpus:
    accounts: dict[str, AccountRecord]
    tweets: dict[str, TweetRecord]

    @property
    def n_accounts(self) -> int:
        return len(self.accounts)

    @property
    def n_tweets(self) -> int:
        return len(self.tweets)

    def tweets_of(self, account_id: str) -> list[TweetRecord]:
        return [self.tweets[t] for t in self.accounts[account_id].tweet_ids]

    def validate(self):
        """Check referential integrity in both directions plus ownership."""
        for tid, tweet in self.tweets.items():
            if tweet.account_id not in self.accounts:
                raise DanglingReference(
                    f"tweet {tid} references unknown account {tweet.account_id}"
                )
        for aid, account in self.accounts.items():
            if not account.tweet_ids:
                raise DanglingReference(f"account {aid} owns no tweets")
            for tid in account.tweet_ids:
                if tid not in self.tweets or self.tweets[tid].account_id != aid:
                    raise DanglingReference(
                        f"account {aid} lists tweet {tid} it does not own"
                    )
        return self

    def subset(self, account_ids) -> "Corpus":
        """New corpus holding the given accounts and their tweets (shared records)."""
        keep = set(account_ids)
        accounts = {a: r for a, r in self.accounts.items() if a in keep}
        tweets = {
            t: r for t, r in self.tweets.items() if r.account_id in keep
        }
        return Corpus(accounts=accounts, tweets=tweets)


class SplitMode(enum.Enum):
    RANDOM_BY_ACCOUNT = "random_by_account"
    BY_BOT_CLASS_COMPOSITION = "by_bot_class_composition"


@dataclass
class SplitSpec:
    mode: SplitMode = SplitMode.RANDOM_BY_ACCOUNT
    train_fraction: float = 0.8
    test_fraction: float = 0.2
    seed: int = 0
    composition: dict[BotClass, str] | None = None

    def __post_init__(self):
        if abs(self.train_fraction + self.test_fraction - 1.0) > 1e-9:
            raise InvalidConfig("train and test fractions must sum to 1")
        if not 0.0 <= self.train_fraction <= 1.0:
            raise InvalidConfig("fractions must lie in [0, 1]")
        if self.mode is SplitMode.BY_BOT_CLASS_COMPOSITION and not self.composition:
            raise InvalidConfig("composition mode requires a composition map")


def _parse_row(line_num, row: dict) -> tuple[TweetRecord, AccountRecord | None]:
    tweet_id = row["tweet_id"].strip()
    account_id = row["account_id"].strip()
    if not tweet_id:
        raise MalformedRow(line_num, "empty tweet_id")
    if not account_id:
        raise MalformedRow(line_num, "empty account_id")
    tweet = TweetRecord(tweet_id=tweet_id, account_id=account_id, raw_text=row["raw_text"])

    bot_class_raw = row["bot_class"].strip()
    if not bot_class_raw:
        return tweet, None  # reference-only row
    try:
        bot_class = BotClass(bot_class_raw)
    except ValueError:
        raise MalformedRow(line_num, f"unknown bot_class {bot_class_raw!r}") from None

    meta_values = [row[f].strip() for f in METADATA_FIELDS]
    if any(meta_values) and not all(meta_values):
        raise MalformedRow(line_num, "metadata columns must be all present or all empty")
    metadata = None
    if all(meta_values):
        try:
            counts = [int(v) for v in meta_values]
        except ValueError:
            raise MalformedRow(line_num, "metadata columns must be integers") from None
        if min(counts) < 0:
            raise MalformedRow(line_num, "metadata columns must be nonnegative")
        metadata = AccountMetadata(*counts)

    band_values = [row[c].strip() for c in PROFILE_BAND_COLUMNS]
    conf_values = [row[c].strip() for c in PROFILE_CONF_COLUMNS]
    filled = band_values + conf_values
    if any(filled) and not all(filled):
        raise MalformedRow(line_num, "profile columns must be all present or all empty")
    profile = None
    if all(filled):
        try:
            bands = {
                attr: _check_band(attr, val)
                for attr, val in zip(ATTRIBUTES, band_values)
            }
            confs = {attr: float(v) for attr, v in zip(ATTRIBUTES, conf_values)}
            profile = ProfileVector(bands=bands, confidences=confs)
        except ValueError as exc:
            raise MalformedRow(line_num, str(exc)) from None

    account = AccountRecord(
        account_id=account_id, bot_class=bot_class, metadata=metadata, profile=profile
    )
    return tweet, account


def _check_band(attribute, value):
    if value not in BANDS[attribute]:
        raise ValueError(f"unknown {attribute} band {value!r}")
    return value


def _merge_account(line_num, existing: AccountRecord, new: AccountRecord):
    same = (
        existing.bot_class == new.bot_class
        and existing.metadata == new.metadata
        and existing.profile == new.profile
    )
    if not same:
        raise MalformedRow(
            line_num, f"conflicting account fields for {new.account_id}"
        )


def _assemble(rows) -> Corpus:
    """rows: iterable of (line_num, TweetRecord, AccountRecord | None)."""
    tweets: dict[str, TweetRecord] = {}
    accounts: dict[str, AccountRecord] = {}
    pending: dict[str, int] = {}  # account ids seen only on reference rows
    for line_num, tweet, account in rows:
        if tweet.tweet_id in tweets:
            raise DuplicateId(f"duplicate tweet_id {tweet.tweet_id}")
        tweets[tweet.tweet_id] = tweet
        if account is not None:
            if tweet.account_id in accounts:
                _merge_account(line_num, accounts[tweet.account_id], account)
            else:
                accounts[tweet.account_id] = account
                pending.pop(tweet.account_id, None)
        elif tweet.account_id not in accounts:
            pending.setdefault(tweet.account_id, line_num)
    if pending:
        aid, line_num = min(pending.items(), key=lambda kv: kv[1])
        raise DanglingReference(
            f"line {line_num}: tweet references account {aid} never defined"
        )
    for tweet in tweets.values():
        accounts[tweet.account_id].tweet_ids.append(tweet.tweet_id)
        tweet.run_preprocess()
    corpus = Corpus(accounts=accounts, tweets=tweets)
    return corpus.validate()


def load_corpus(path, format: str | None = None) -> Corpus:
    """Load a corpus from CSV or JSONL; format inferred from the extension."""
    path = Path(path)
    fmt = format or ("jsonl" if path.suffix.lower() in (".jsonl", ".json") else "csv")
    if fmt == "csv":
        return _load_csv(path)
    if fmt == "jsonl":
        return _load_jsonl(path)
    raise InvalidConfig(f"unknown corpus format {fmt!r}")


def _load_csv(path: Path) -> Corpus:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MissingField("empty file, no header")
        missing = set(CSV_HEADER) - set(reader.fieldnames)
        if missing:
            raise MissingField(f"missing columns: {sorted(missing)}")
        extra = set(reader.fieldnames) - set(CSV_HEADER)
        if extra:
            raise MissingField(f"unexpected columns: {sorted(extra)}")

        def rows():
            for row in reader:
                if None in row or any(v is None for v in row.values()):
                    raise MalformedRow(reader.line_num, "wrong number of fields")
                tweet, account = _parse_row(reader.line_num, row)
                yield reader.line_num, tweet, account

        return _assemble(rows())


def _load_jsonl(path: Path) -> Corpus:
    def rows():
        with open(path, encoding="utf-8") as fh:
            for line_num, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedRow(line_num, f"invalid JSON: {exc}") from None
                yield line_num, *_parse_json_object(line_num, obj)

    return _assemble(rows())


def _parse_json_object(line_num, obj) -> tuple[TweetRecord, AccountRecord | None]:
    for key in ("tweet_id", "raw_text", "account"):
        if key not in obj:
            raise MissingField(f"line {line_num}: missing field {key!r}")
    acct = obj["account"]
    if "account_id" not in acct:
        raise MissingField(f"line {line_num}: missing field 'account.account_id'")
    row = {
        "tweet_id": str(obj["tweet_id"]),
        "account_id": str(acct["account_id"]),
        "bot_class": str(acct.get("bot_class") or ""),
        "raw_text": str(obj["raw_text"]),
    }
    for name in METADATA_FIELDS:
        v = acct.get(name)
        row[name] = "" if v is None else str(v)
    for col, attr in zip(PROFILE_BAND_COLUMNS, ATTRIBUTES):
        v = acct.get(col)
        row[col] = "" if v is None else str(v)
    for col in PROFILE_CONF_COLUMNS:
        v = acct.get(col)
        row[col] = "" if v is None else repr(float(v)) if isinstance(v, float) else str(v)
    return _parse_row(line_num, row)


def write_corpus(corpus: Corpus, path, format: str | None = None) -> None:
    """Write all tweets, sorted by tweet_id, with full account fields each row."""
    path = Path(path)
    fmt = format or ("jsonl" if path.suffix.lower() in (".jsonl", ".json") else "csv")
    order = sorted(corpus.tweets)
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for tid in order:
                writer.writerow(_csv_row(corpus, corpus.tweets[tid]))
    elif fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for tid in order:
                fh.write(json.dumps(_json_row(corpus, corpus.tweets[tid]), sort_keys=True))
                fh.write("\n")
    else:
        raise InvalidConfig(f"unknown corpus format {fmt!r}")


def _csv_row(corpus, tweet):
    account = corpus.accounts[tweet.account_id]
    meta = [""] * len(METADATA_FIELDS)
    if account.metadata is not None:
        meta = [str(getattr(account.metadata, f)) for f in METADATA_FIELDS]
    bands = [""] * 4
    confs = [""] * 4
    if account.profile is not None:
        bands = [account.profile.band(a) for a in ATTRIBUTES]
        confs = [repr(account.profile.confidence(a)) for a in ATTRIBUTES]
    return [
        tweet.tweet_id,
        tweet.account_id,
        account.bot_class.value,
        tweet.raw_text,
        *meta,
        *bands,
        *confs,
    ]


def _json_row(corpus, tweet):
    account = corpus.accounts[tweet.account_id]
    acct_obj = {"account_id": account.account_id, "bot_class": account.bot_class.value}
    for name in METADATA_FIELDS:
        acct_obj[name] = (
            None if account.metadata is None else getattr(account.metadata, name)
        )
    for col, attr in zip(PROFILE_BAND_COLUMNS, ATTRIBUTES):
        acct_obj[col] = None if account.profile is None else account.profile.band(attr)
    for col, attr in zip(PROFILE_CONF_COLUMNS, ATTRIBUTES):
        acct_obj[col] = (
            None if account.profile is None else account.profile.confidence(attr)
        )
    return {"tweet_id": tweet.tweet_id, "raw_text": tweet.raw_text, "account": acct_obj}


def split_corpus(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """Partition accounts into train/test; tweets follow their account."""
    by_class: dict[BotClass, list[str]] = {}
    for aid in sorted(corpus.accounts):
        by_class.setdefault(corpus.accounts[aid].bot_class, []).append(aid)
    for cls, ids in by_class.items():
        if len(ids) < 2:
            raise InsufficientAccounts(
                f"class {cls.value} has {len(ids)} account(s); need >= 2"
            )

    rng = np.random.default_rng(spec.seed)
    train_ids: list[str] = []
    test_ids: list[str] = []
    if spec.mode is SplitMode.RANDOM_BY_ACCOUNT:
        for cls in sorted(by_class, key=lambda c: c.value):
            ids = by_class[cls]
            perm = rng.permutation(len(ids))
            n_train = int(round(spec.train_fraction * len(ids)))
            for k, idx in enumerate(perm):
                (train_ids if k < n_train else test_ids).append(ids[idx])
    else:
        held_out = set(spec.composition or {})
        for cls in sorted(by_class, key=lambda c: c.value):
            ids = by_class[cls]
            if cls is BotClass.GENUINE:
                perm = rng.permutation(len(ids))
                n_train = int(round(spec.train_fraction * len(ids)))
                for k, idx in enumerate(perm):
                    (train_ids if k < n_train else test_ids).append(ids[idx])
            elif cls in held_out:
                test_ids.extend(ids)
            else:
                train_ids.extend(ids)
    return corpus.subset(train_ids), corpus.subset(test_ids)


@dataclass
class CorpusSummary:
    per_class: dict[BotClass, tuple[int, int]]  # (accounts, tweets)
    total_accounts: int
    total_tweets: int

    def format_table(self) -> str:
        lines = [f"{'class':<18}{'accounts':>10}{'tweets':>10}"]
        for cls in BotClass:
            a, t = self.per_class.get(cls, (0, 0))
            lines.append(f"{cls.value:<18}{a:>10}{t:>10}")
        lines.append(f"{'total':<18}{self.total_accounts:>10}{self.total_tweets:>10}")
        return "\n".join(lines)


def summarize(corpus: Corpus) -> CorpusSummary:
    per_class: dict[BotClass, tuple[int, int]] = {}
    for account in corpus.accounts.values():
        a, t = per_class.get(account.bot_class, (0, 0))
        per_class[account.bot_class] = (a + 1, t + len(account.tweet_ids))
    return CorpusSummary(
        per_class=per_class,
        total_accounts=corpus.n_accounts,
        total_tweets=corpus.n_tweets,
    )


def corpus_fingerprint(corpus: Corpus) -> str:
    """Identity hash of the account/tweet id sets (orders out, content in)."""
    h = hashlib.sha256()
    for aid in sorted(corpus.accounts):
        h.update(aid.encode("utf-8"))
        h.update(b"\x00")
    h.update(b"\x01")
    for tid in sorted(corpus.tweets):
        h.update(tid.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()
