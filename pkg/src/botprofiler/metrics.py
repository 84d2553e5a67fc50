"""Classification metrics, error-sample export, and classifier comparison.

Positive class is bot throughout. AUC is the rank statistic (mid-ranks on
ties); MCC returns 0 with a degeneracy flag when any confusion marginal is
zero. Reports carry a fingerprint of the test set so comparisons across
different test data fail loudly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyInput, MismatchedTestSets, UnwritableOutput
from .preprocess import is_retweet_text

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(scored, threshold: float = DEFAULT_THRESHOLD) -> ConfusionCounts:
    tp = fp = tn = fn = 0
    for prob, is_bot in scored:
        predicted_bot = prob >= threshold
        if predicted_bot and is_bot:
            tp += 1
        elif predicted_bot:
            fp += 1
        elif is_bot:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fp, tn, fn)


def accuracy_from(counts: ConfusionCounts) -> float:
    return (counts.tp + counts.tn) / counts.total


def f1_from(counts: ConfusionCounts) -> float:
    denom = 2 * counts.tp + counts.fp + counts.fn
    return 2 * counts.tp / denom if denom else 0.0


def mcc_from(counts: ConfusionCounts) -> tuple[float, bool]:
    """(mcc, degenerate); 0 with a flag when any marginal count is zero."""
    tp, fp, tn, fn = counts.tp, counts.fp, counts.tn, counts.fn
    marginals = [(tp + fp), (tp + fn), (tn + fp), (tn + fn)]
    if 0 in marginals:
        return 0.0, True
    num = tp * tn - fp * fn
    den = np.sqrt(float(marginals[0]) * marginals[1] * marginals[2] * marginals[3])
    return float(num / den), False


def auc_rank(scored) -> float | None:
    """Mann-Whitney AUC with mid-ranks for ties; None if one class absent."""
    scores = np.array([p for p, _ in scored], dtype=np.float64)
    labels = np.array([bool(y) for _, y in scored])
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores))
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    pos_rank_sum = ranks[labels].sum()
    return float((pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@dataclass
class MetricsReport:
    classifier: str
    unit: str
    counts: ConfusionCounts
    accuracy: float
    f1: float
    mcc: float
    mcc_degenerate: bool
    auc: float | None
    n_items: int
    fingerprint: str | None = None

    def to_dict(self) -> dict:
        return {
            "classifier": self.classifier,
            "unit": self.unit,
            "counts": {
                "tp": self.counts.tp,
                "fp": self.counts.fp,
                "tn": self.counts.tn,
                "fn": self.counts.fn,
            },
            "accuracy": self.accuracy,
            "f1": self.f1,
            "mcc": self.mcc,
            "mcc_degenerate": self.mcc_degenerate,
            "auc": self.auc,
            "n_items": self.n_items,
            "fingerprint": self.fingerprint,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            classifier=d["classifier"],
            unit=d["unit"],
            counts=ConfusionCounts(**d["counts"]),
            accuracy=d["accuracy"],
            f1=d["f1"],
            mcc=d["mcc"],
            mcc_degenerate=d["mcc_degenerate"],
            auc=d["auc"],
            n_items=d["n_items"],
            fingerprint=d.get("fingerprint"),
        )


def compute_metrics(
    scored,
    classifier: str = "model",
    unit: str = "tweet",
    fingerprint: str | None = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> MetricsReport:
    """Metrics over (prob_bot, true_is_bot) pairs."""
    scored = list(scored)
    if not scored:
        raise EmptyInput("cannot compute metrics over zero items")
    counts = confusion(scored, threshold)
    mcc, degenerate = mcc_from(counts)
    return MetricsReport(
        classifier=classifier,
        unit=unit,
        counts=counts,
        accuracy=accuracy_from(counts),
        f1=f1_from(counts),
        mcc=mcc,
        mcc_degenerate=degenerate,
        auc=auc_rank(scored),
        n_items=len(scored),
        fingerprint=fingerprint,
    )


def format_report_table(reports) -> str:
    header = f"{'classifier':<22}{'unit':<9}{'acc':>8}{'f1':>8}{'mcc':>8}{'auc':>8}"
    lines = [header]
    for r in reports:
        auc = "n/a" if r.auc is None else f"{r.auc:.3f}"
        lines.append(
            f"{r.classifier:<22}{r.unit:<9}{r.accuracy:>8.3f}{r.f1:>8.3f}"
            f"{r.mcc:>8.3f}{auc:>8}"
        )
    return "\n".join(lines)


def compare_classifiers(reports) -> list[MetricsReport]:
    """Rank by F1 desc, ties by accuracy desc, then classifier tag."""
    reports = list(reports)
    if len(reports) < 2:
        raise EmptyInput("need at least two reports to compare")
    prints = {r.fingerprint for r in reports}
    if len(prints) != 1 or None in prints:
        raise MismatchedTestSets(
            f"reports come from different test sets: {sorted(map(str, prints))}"
        )
    return sorted(reports, key=lambda r: (-r.f1, -r.accuracy, r.classifier))


def export_error_samples(predictions, corpus, out_dir, classifier: str = "model") -> dict:
    """Write true-positive and false-positive tweet files plus a summary.

    predictions: tweet-unit Prediction objects. Sample files hold exactly one
    tweet per line (`tweet_id<TAB>text`, newlines escaped), ordered by
    tweet_id; counts and the retweet fraction go to summary.txt and the
    returned dict.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UnwritableOutput(f"cannot create {out_dir}: {exc}") from None

    buckets = {"true_positives": [], "false_positives": []}
    for pred in predictions:
        if pred.unit != "tweet" or pred.label != "bot":
            continue
        tweet = corpus.tweets[pred.item_id]
        truly_bot = corpus.accounts[tweet.account_id].is_bot
        key = "true_positives" if truly_bot else "false_positives"
        buckets[key].append(tweet)

    summary = {}
    summary_lines = []
    for key in ("true_positives", "false_positives"):
        tweets = sorted(buckets[key], key=lambda t: t.tweet_id)
        path = out_dir / f"{classifier}_{key}.txt"
        try:
            with open(path, "w", encoding="utf-8") as fh:
                for tweet in tweets:
                    text = tweet.raw_text.replace("\\", "\\\\").replace("\n", "\\n")
                    fh.write(f"{tweet.tweet_id}\t{text}\n")
        except OSError as exc:
            raise UnwritableOutput(f"cannot write {path}: {exc}") from None
        rt = sum(is_retweet_text(t.raw_text) for t in tweets)
        frac = rt / len(tweets) if tweets else 0.0
        summary[key] = {
            "count": len(tweets),
            "rt_count": rt,
            "rt_fraction": frac,
            "path": str(path),
        }
        summary_lines.append(
            f"{classifier} {key}: count={len(tweets)} rt_count={rt} rt_fraction={frac:.4f}"
        )
    try:
        (out_dir / "summary.txt").write_text("\n".join(summary_lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise UnwritableOutput(f"cannot write summary: {exc}") from None
    return summary


def write_metrics_json(report_or_reports, path):
    """Deterministic JSON serialization (sorted keys, no timestamps)."""
    if isinstance(report_or_reports, MetricsReport):
        doc = report_or_reports.to_dict()
    else:
        doc = [r.to_dict() for r in report_or_reports]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
