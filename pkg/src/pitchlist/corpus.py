"""Loading, validation, and filtering of the article / journalist / outlet /
email datasets from local CSV or JSON-lines files.

Loaders never abort on a bad row: rows that fail validation are skipped and
counted in the returned LoadReport, preserving the order of the rows that
survive. Only an unreadable file or unknown format is fatal.
"""

from __future__ import annotations

import csv
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from statistics import median
from typing import TYPE_CHECKING, Iterable

from .errors import InputFileError
from .textprep import REPLACEMENT_CHAR, repair_unicode

if TYPE_CHECKING:
    from .sentiment import SentimentStats

TOPICS = ("sports", "politics", "entertainment", "tech", "business", "unknown")

MIN_ARTICLES_DEFAULT = 10

ARTICLE_FIELDS = ("id", "title", "description", "full_text", "topic", "authors", "outlet", "url")

DEFAULT_AUTHOR_STOP_TOKENS = frozenset({"by", "staff", "writer", "reporter", "editor"})

_AUTHOR_SPLIT = re.compile(r",|;|&|\|| and ", re.IGNORECASE)


@dataclass(frozen=True)
class Article:
    id: str
    title: str
    description: str
    full_text: str
    topic: str
    authors: tuple[str, ...]
    outlet: str
    url: str | None = None


@dataclass
class JournalistProfile:
    full_name: str
    first_name: str
    last_name: str
    article_ids: tuple[str, ...]
    outlets: dict[str, int]
    beats: tuple[str, ...] = ()
    muckrack_url: str | None = None
    email: str | None = None
    social_handles: dict[str, str] = field(default_factory=dict)
    sentiment: "SentimentStats | None" = None


@dataclass(frozen=True)
class Outlet:
    name: str
    journalist_count: int
    article_count: int
    twitter_followers: int | None = None
    alexa_popularity: int | None = None
    reach_rank: int | None = None
    country_rank: int | None = None

    def __post_init__(self):
        for label in ("alexa_popularity", "reach_rank", "country_rank"):
            value = getattr(self, label)
            if value is not None and value < 1:
                raise ValueError(f"outlet {self.name!r}: {label} must be >= 1")


@dataclass(frozen=True)
class EmailRecord:
    first_name: str
    last_name: str
    address: str

    def __post_init__(self):
        local, sep, domain = self.address.partition("@")
        if not sep or not local or not domain or "@" in domain:
            raise ValueError(f"malformed email address {self.address!r}")


@dataclass
class LoadReport:
    total_rows: int = 0
    loaded: int = 0
    rejected: int = 0
    reasons: Counter = field(default_factory=Counter)

    def reject(self, reason: str) -> None:
        self.rejected += 1
        self.reasons[reason] += 1


def split_authors(
    raw: str | list[str],
    stop_tokens: frozenset[str] = DEFAULT_AUTHOR_STOP_TOKENS,
) -> tuple[str, ...]:
    """Split a combined author string into individual cleaned names.

    Separators: comma, semicolon, ampersand, pipe, and the word "and".
    Title keywords from stop_tokens are dropped from each name; duplicates
    are removed preserving first appearance.
    """
    if isinstance(raw, str):
        parts = _AUTHOR_SPLIT.split(raw)
    else:
        parts = [p for chunk in raw for p in _AUTHOR_SPLIT.split(chunk)]
    names = []
    for part in parts:
        words = [w for w in part.split() if w.lower() not in stop_tokens]
        name = " ".join(words)
        if name:
            names.append(name)
    return tuple(dict.fromkeys(names))


def _normalize_topic(value: str) -> str:
    topic = (value or "").strip().lower()
    return topic if topic in TOPICS else "unknown"


def _article_from_record(
    record: dict, report: LoadReport, stop_tokens: frozenset[str]
) -> Article | None:
    missing = [k for k in ("id", "full_text", "authors", "outlet") if k not in record]
    if missing:
        report.reject(f"missing_field:{missing[0]}")
        return None
    full_text = str(record.get("full_text") or "").strip()
    if not full_text:
        report.reject("empty_full_text")
        return None
    authors = split_authors(record["authors"] if record["authors"] is not None else "", stop_tokens)
    if not authors:
        report.reject("no_authors")
        return None
    url = record.get("url") or None
    return Article(
        id=str(record["id"]),
        title=str(record.get("title") or ""),
        description=str(record.get("description") or ""),
        full_text=full_text,
        topic=_normalize_topic(str(record.get("topic") or "")),
        authors=authors,
        outlet=str(record.get("outlet") or "").strip(),
        url=str(url) if url else None,
    )


def load_articles(
    path,
    format: str = "csv",
    column_map: dict[str, str] | None = None,
    author_stop_tokens: frozenset[str] = DEFAULT_AUTHOR_STOP_TOKENS,
) -> tuple[list[Article], LoadReport]:
    """Load and validate articles; input order preserved for accepted rows.

    column_map renames source columns/keys to the canonical field names,
    e.g. {"body": "full_text"}.
    """
    if format not in ("csv", "jsonl"):
        raise InputFileError(f"unknown article format {format!r}")
    try:
        with open(path, encoding="utf-8") as f:
            raw_rows: list[dict] = []
            if format == "csv":
                for row in csv.DictReader(f):
                    raw_rows.append(row)
            else:
                for line in f:
                    line = line.strip()
                    if line:
                        raw_rows.append(line)  # parsed below so bad JSON is per-row
    except OSError as exc:
        raise InputFileError(f"cannot read article file {path}: {exc}") from exc

    report = LoadReport()
    articles: list[Article] = []
    for raw in raw_rows:
        report.total_rows += 1
        if isinstance(raw, str):
            try:
                record = json.loads(raw)
            except json.JSONDecodeError:
                report.reject("malformed_json")
                continue
            if not isinstance(record, dict):
                report.reject("malformed_json")
                continue
        else:
            record = dict(raw)
        if column_map:
            record = {column_map.get(k, k): v for k, v in record.items()}
        try:
            article = _article_from_record(record, report, author_stop_tokens)
        except (TypeError, AttributeError):
            report.reject("malformed_row")
            continue
        if article is not None:
            articles.append(article)
            report.loaded += 1
    return articles, report


def _name_has_bad_unicode(name: str) -> bool:
    return REPLACEMENT_CHAR in repair_unicode(name)


def split_name(full_name: str) -> tuple[str, str]:
    """first = first whitespace token, last = last token; middles ignored."""
    tokens = full_name.split()
    return tokens[0], tokens[-1]


def build_journalists(
    articles: Iterable[Article], min_articles: int = MIN_ARTICLES_DEFAULT
) -> list[JournalistProfile]:
    """One profile per author with at least min_articles credited articles.

    Collaborative articles credit every listed author. Names that still
    contain the replacement character after unicode repair are dropped.
    Output is sorted by full name.
    """
    if min_articles < 1:
        raise ValueError("min_articles must be >= 1")
    by_author: dict[str, list[Article]] = {}
    for article in articles:
        for author in article.authors:
            by_author.setdefault(author, []).append(article)
    profiles = []
    for name in sorted(by_author):
        credited = by_author[name]
        if len(credited) < min_articles:
            continue
        if _name_has_bad_unicode(name) or not name.split():
            continue
        first, last = split_name(name)
        outlets = Counter(a.outlet for a in credited)
        profiles.append(
            JournalistProfile(
                full_name=name,
                first_name=first,
                last_name=last,
                article_ids=tuple(a.id for a in credited),
                outlets=dict(sorted(outlets.items())),
            )
        )
    return profiles


def filter_outlets(outlets: list[Outlet], min_journalists: int = 3) -> list[Outlet]:
    """Keep outlets that pass the journalist-count floor and beat the medians.

    Medians of followers and Alexa rank are computed over the outlets that
    pass the journalist-count test (missing values excluded); an outlet is
    kept only when its followers are strictly above the follower median and
    its Alexa rank strictly below the Alexa median. Outlets missing either
    statistic are dropped.
    """
    staffed = [o for o in outlets if o.journalist_count >= min_journalists]
    followers = [o.twitter_followers for o in staffed if o.twitter_followers is not None]
    alexa = [o.alexa_popularity for o in staffed if o.alexa_popularity is not None]
    if not followers or not alexa:
        return []
    followers_median = median(followers)
    alexa_median = median(alexa)
    return [
        o
        for o in staffed
        if o.twitter_followers is not None
        and o.alexa_popularity is not None
        and o.twitter_followers > followers_median
        and o.alexa_popularity < alexa_median
    ]


def load_emails(path) -> tuple[list[EmailRecord], LoadReport]:
    """Email dataset CSV: first_name,last_name,address."""
    report = LoadReport()
    records: list[EmailRecord] = []
    try:
        with open(path, encoding="utf-8", newline="") as f:
            for row in csv.DictReader(f):
                report.total_rows += 1
                try:
                    records.append(
                        EmailRecord(
                            first_name=(row.get("first_name") or "").strip(),
                            last_name=(row.get("last_name") or "").strip(),
                            address=(row.get("address") or "").strip(),
                        )
                    )
                    report.loaded += 1
                except ValueError:
                    report.reject("malformed_address")
    except OSError as exc:
        raise InputFileError(f"cannot read email file {path}: {exc}") from exc
    return records, report


def _opt_int(value: str | None) -> int | None:
    value = (value or "").strip()
    return int(value) if value else None


def load_outlets(path) -> tuple[list[Outlet], LoadReport]:
    """Outlet CSV: name,journalist_count,article_count,twitter_followers,
    alexa_popularity,reach_rank,country_rank (blank = missing)."""
    report = LoadReport()
    outlets: list[Outlet] = []
    try:
        with open(path, encoding="utf-8", newline="") as f:
            for row in csv.DictReader(f):
                report.total_rows += 1
                try:
                    outlets.append(
                        Outlet(
                            name=(row.get("name") or "").strip(),
                            journalist_count=int(row.get("journalist_count") or 0),
                            article_count=int(row.get("article_count") or 0),
                            twitter_followers=_opt_int(row.get("twitter_followers")),
                            alexa_popularity=_opt_int(row.get("alexa_popularity")),
                            reach_rank=_opt_int(row.get("reach_rank")),
                            country_rank=_opt_int(row.get("country_rank")),
                        )
                    )
                    report.loaded += 1
                except ValueError:
                    report.reject("malformed_row")
    except OSError as exc:
        raise InputFileError(f"cannot read outlet file {path}: {exc}") from exc
    return outlets, report


# --- serialization helpers (JSONL persistence of the canonical model) -------


def article_to_dict(article: Article) -> dict:
    return {
        "id": article.id,
        "title": article.title,
        "description": article.description,
        "full_text": article.full_text,
        "topic": article.topic,
        "authors": list(article.authors),
        "outlet": article.outlet,
        "url": article.url,
    }


def journalist_to_dict(profile: JournalistProfile) -> dict:
    return {
        "full_name": profile.full_name,
        "first_name": profile.first_name,
        "last_name": profile.last_name,
        "article_ids": list(profile.article_ids),
        "outlets": profile.outlets,
        "beats": list(profile.beats),
        "muckrack_url": profile.muckrack_url,
        "email": profile.email,
        "social_handles": profile.social_handles,
    }


def journalist_from_dict(data: dict) -> JournalistProfile:
    return JournalistProfile(
        full_name=data["full_name"],
        first_name=data["first_name"],
        last_name=data["last_name"],
        article_ids=tuple(data.get("article_ids", ())),
        outlets=dict(data.get("outlets", {})),
        beats=tuple(data.get("beats", ())),
        muckrack_url=data.get("muckrack_url"),
        email=data.get("email"),
        social_handles=dict(data.get("social_handles", {})),
    )


def write_journalists(profiles: list[JournalistProfile], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for profile in profiles:
            f.write(json.dumps(journalist_to_dict(profile), sort_keys=True) + "\n")


def read_journalists(path) -> list[JournalistProfile]:
    profiles = []
    try:
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    profiles.append(journalist_from_dict(json.loads(line)))
    except OSError as exc:
        raise InputFileError(f"cannot read journalist file {path}: {exc}") from exc
    return profiles
