"""Valence-lexicon sentiment scoring and journalist / outlet / topic
aggregates.

Scoring is exact token lookup against the shipped AFINN-111 single-word
lexicon (integer valences in [-5, 5]); proportions are computed over the
full token count, and unmatched tokens contribute nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from statistics import mean
from typing import Iterable, Mapping

from .corpus import Article, JournalistProfile, TOPICS
from .errors import InputFileError
from .textprep import CleanConfig, TokenList, clean


@dataclass(frozen=True)
class SentimentStats:
    valence_sum: int = 0
    positive_word_proportion: float = 0.0
    negative_word_proportion: float = 0.0
    scored_token_count: int = 0
    total_token_count: int = 0


class ValenceLexicon:
    """word -> integer valence in [-5, 5], zero never stored."""

    def __init__(self, values: Mapping[str, int]):
        if not values:
            raise ValueError("valence lexicon is empty")
        for word, valence in values.items():
            if valence == 0 or not -5 <= valence <= 5:
                raise ValueError(f"valence for {word!r} out of range: {valence}")
        self.values = dict(values)

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, word: str) -> bool:
        return word in self.values

    def get(self, word: str) -> int | None:
        return self.values.get(word)


def load_lexicon(path=None) -> ValenceLexicon:
    """Load a word<TAB>valence lexicon file; default is the shipped AFINN-111
    single-word subset."""
    if path is None:
        text = resources.files("pitchlist").joinpath("data/afinn-111.tsv").read_text("utf-8")
    else:
        try:
            with open(path, encoding="utf-8") as f:
                text = f.read()
        except OSError as exc:
            raise InputFileError(f"cannot read lexicon {path}: {exc}") from exc
    values: dict[str, int] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, valence = line.split("\t")
        values[word] = int(valence)
    return ValenceLexicon(values)


def score(tokens: TokenList | Iterable[str], lexicon: ValenceLexicon) -> SentimentStats:
    """Sum matched valences and report positive/negative word proportions."""
    valence_sum = 0
    positive = 0
    negative = 0
    scored = 0
    total = 0
    for token in tokens:
        total += 1
        valence = lexicon.get(token)
        if valence is None:
            continue
        scored += 1
        valence_sum += valence
        if valence > 0:
            positive += 1
        else:
            negative += 1
    if total == 0:
        return SentimentStats()
    return SentimentStats(
        valence_sum=valence_sum,
        positive_word_proportion=positive / total,
        negative_word_proportion=negative / total,
        scored_token_count=scored,
        total_token_count=total,
    )


def article_tokens(article: Article, config: CleanConfig | None = None) -> TokenList:
    return clean(article.full_text, config)


@dataclass
class JournalistSentiment:
    journalist: str
    mean_valence: float
    per_article: dict[str, SentimentStats]


def journalist_sentiment(
    profile: JournalistProfile,
    articles: Mapping[str, Article],
    lexicon: ValenceLexicon,
    config: CleanConfig | None = None,
) -> JournalistSentiment:
    """Mean of per-article valence sums over the journalist's articles."""
    found = [articles[i] for i in profile.article_ids if i in articles]
    if not found:
        raise ValueError(
            f"journalist {profile.full_name!r} has no retrievable articles"
        )
    per_article = {a.id: score(article_tokens(a, config), lexicon) for a in found}
    return JournalistSentiment(
        journalist=profile.full_name,
        mean_valence=mean(s.valence_sum for s in per_article.values()),
        per_article=per_article,
    )


@dataclass(frozen=True)
class OutletReportRow:
    journalist: str
    article_count: int
    mean_valence: float


def outlet_report(
    outlet: str,
    profiles: list[JournalistProfile],
    articles: Mapping[str, Article],
    lexicon: ValenceLexicon,
    config: CleanConfig | None = None,
) -> list[OutletReportRow]:
    """Journalists at the outlet ranked by article count (ties by name),
    each with their mean valence over their articles at that outlet."""
    at_outlet = [p for p in profiles if outlet in p.outlets]
    if not at_outlet:
        raise ValueError(f"unknown outlet {outlet!r}")
    rows = []
    for profile in at_outlet:
        own = [
            articles[i]
            for i in profile.article_ids
            if i in articles and articles[i].outlet == outlet
        ]
        sums = [score(article_tokens(a, config), lexicon).valence_sum for a in own]
        rows.append(
            OutletReportRow(
                journalist=profile.full_name,
                article_count=profile.outlets[outlet],
                mean_valence=mean(sums) if sums else 0.0,
            )
        )
    rows.sort(key=lambda r: (-r.article_count, r.journalist))
    return rows


@dataclass(frozen=True)
class TopicReportRow:
    topic: str
    article_count: int
    valence_sum: int
    mean_valence: float
    mean_positive_proportion: float
    mean_negative_proportion: float


def topic_report(
    articles: Iterable[Article],
    lexicon: ValenceLexicon,
    config: CleanConfig | None = None,
) -> list[TopicReportRow]:
    """Valence breakdown per topic; both sums and proportions are reported."""
    by_topic: dict[str, list[SentimentStats]] = {t: [] for t in TOPICS}
    for article in articles:
        by_topic[article.topic].append(score(article_tokens(article, config), lexicon))
    rows = []
    for topic in TOPICS:
        stats = by_topic[topic]
        if not stats:
            continue
        rows.append(
            TopicReportRow(
                topic=topic,
                article_count=len(stats),
                valence_sum=sum(s.valence_sum for s in stats),
                mean_valence=mean(s.valence_sum for s in stats),
                mean_positive_proportion=mean(s.positive_word_proportion for s in stats),
                mean_negative_proportion=mean(s.negative_word_proportion for s in stats),
            )
        )
    return rows


def outlet_report_csv(rows: list[OutletReportRow]) -> str:
    lines = ["journalist,article_count,mean_valence"]
    for r in rows:
        name = f'"{r.journalist}"' if "," in r.journalist else r.journalist
        lines.append(f"{name},{r.article_count},{r.mean_valence:.6f}")
    return "\n".join(lines) + "\n"


def topic_report_csv(rows: list[TopicReportRow]) -> str:
    lines = [
        "topic,article_count,valence_sum,mean_valence,"
        "mean_positive_proportion,mean_negative_proportion"
    ]
    for r in rows:
        lines.append(
            f"{r.topic},{r.article_count},{r.valence_sum},{r.mean_valence:.6f},"
            f"{r.mean_positive_proportion:.6f},{r.mean_negative_proportion:.6f}"
        )
    return "\n".join(lines) + "\n"
