"""Press-release to journalist recommendation over TF-IDF article vectors.

The index stores one vector per article (title, description, and body
concatenated, cleaned, and transformed), plus the author tables needed to
turn nearest articles into journalist recommendations with contact details.
Neighbor search is an exact scan with sparse dot products.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import vectorspace
from .corpus import Article, JournalistProfile, journalist_from_dict, journalist_to_dict
from .errors import InputFileError, NoSignalError, NonEnglishTextError
from .textprep import CleanConfig, TokenList, clean
from .vectorspace import SparseVector, TfIdfModel

INDEX_TAG = "pitchlist-index v1"

DEFAULT_K = 5


@dataclass(frozen=True)
class ArticleMeta:
    id: str
    title: str
    outlet: str
    authors: tuple[str, ...]


@dataclass
class RecommenderIndex:
    model: TfIdfModel
    config: CleanConfig
    articles: list[ArticleMeta]          # indexed articles, build order
    vectors: list[SparseVector]          # aligned with articles
    profiles: dict[str, JournalistProfile]
    skipped: dict[str, str]              # article id -> reason
    matrix: object | None = field(repr=False, default=None)

    def __len__(self) -> int:
        return len(self.articles)


@dataclass(frozen=True)
class Evidence:
    article_id: str
    title: str
    outlet: str
    similarity: float


@dataclass
class Recommendation:
    journalist: JournalistProfile
    evidence: list[Evidence]
    best_similarity: float

    @property
    def beats(self) -> tuple[str, ...]:
        return self.journalist.beats

    @property
    def contacts(self) -> dict[str, str]:
        found = {}
        if self.journalist.email:
            found["email"] = self.journalist.email
        if self.journalist.muckrack_url:
            found["muckrack_url"] = self.journalist.muckrack_url
        found.update(self.journalist.social_handles)
        return found


def article_text(article: Article) -> str:
    """The text an article is indexed under: title, description, body."""
    return " ".join(p for p in (article.title, article.description, article.full_text) if p)


def build_index(
    articles: list[Article],
    profiles: list[JournalistProfile],
    config: CleanConfig | None = None,
) -> RecommenderIndex:
    """Clean every article, fit the TF-IDF model, and store all vectors.

    Articles that clean to nothing, fail the language filter, or have no
    profiled author are excluded and recorded with a reason. Deterministic
    for fixed inputs and config.
    """
    if config is None:
        config = CleanConfig()
    if not articles:
        raise ValueError("cannot build an index over an empty corpus")
    by_name = {p.full_name: p for p in profiles}

    kept: list[tuple[Article, tuple[str, ...], TokenList]] = []
    skipped: dict[str, str] = {}
    for article in articles:
        profiled = tuple(a for a in article.authors if a in by_name)
        if not profiled:
            skipped[article.id] = "no_profiled_author"
            continue
        try:
            tokens = clean(article_text(article), config)
        except NonEnglishTextError:
            skipped[article.id] = "non_english"
            continue
        if not tokens:
            skipped[article.id] = "empty_after_cleaning"
            continue
        kept.append((article, profiled, tokens))
    if not kept:
        raise ValueError("no indexable article (all cleaned to empty or unprofiled)")

    model = vectorspace.fit([tokens for _, _, tokens in kept], norm="l2")
    metas = []
    vectors = []
    used_profiles: dict[str, JournalistProfile] = {}
    for article, profiled, tokens in kept:
        metas.append(
            ArticleMeta(
                id=article.id,
                title=article.title,
                outlet=article.outlet,
                authors=profiled,
            )
        )
        vectors.append(vectorspace.transform(model, tokens))
        for author in profiled:
            used_profiles.setdefault(author, by_name[author])
    return RecommenderIndex(
        model=model,
        config=config,
        articles=metas,
        vectors=vectors,
        profiles=used_profiles,
        skipped=skipped,
    )


def _matrix(index: RecommenderIndex):
    if index.matrix is None:
        index.matrix = vectorspace.stack(index.vectors, len(index.model.vocabulary))
    return index.matrix


def recommend(index: RecommenderIndex, press_release: str, k: int = DEFAULT_K) -> list[Recommendation]:
    """The journalists behind the k most similar indexed articles.

    Raises NoSignalError when the press release cleans to nothing or every
    token is out of vocabulary. Nearest-article ties break by ascending
    article id; authors are ranked by their best article similarity.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    tokens = clean(press_release, index.config)
    if not tokens:
        raise NoSignalError("press release cleans to an empty token list")
    query = vectorspace.transform(index.model, tokens)
    if not query:
        raise NoSignalError("press release has no in-vocabulary token")

    dense = np.zeros(len(index.model.vocabulary))
    for i, w in query.entries:
        dense[i] = w
    scores = _matrix(index).dot(dense)

    order = sorted(range(len(scores)), key=lambda i: (-scores[i], index.articles[i].id))
    top = order[: min(k, len(order))]

    recs: dict[str, Recommendation] = {}
    for i in top:
        meta = index.articles[i]
        ev = Evidence(
            article_id=meta.id,
            title=meta.title,
            outlet=meta.outlet,
            similarity=float(scores[i]),
        )
        for author in meta.authors:
            rec = recs.get(author)
            if rec is None:
                recs[author] = Recommendation(
                    journalist=index.profiles[author],
                    evidence=[ev],
                    best_similarity=ev.similarity,
                )
            else:
                rec.evidence.append(ev)
    for rec in recs.values():
        rec.evidence.sort(key=lambda e: (-e.similarity, e.article_id))
        rec.best_similarity = rec.evidence[0].similarity
    return list(recs.values())


def recommendations_to_dict(recs: list[Recommendation]) -> list[dict]:
    """Machine-readable form: one record per journalist with evidence array."""
    out = []
    for rec in recs:
        out.append(
            {
                "journalist": rec.journalist.full_name,
                "best_similarity": rec.best_similarity,
                "beats": list(rec.beats),
                "outlets": rec.journalist.outlets,
                "contacts": rec.contacts,
                "evidence": [
                    {
                        "article_id": e.article_id,
                        "title": e.title,
                        "outlet": e.outlet,
                        "similarity": e.similarity,
                    }
                    for e in rec.evidence
                ],
            }
        )
    return out


# --- persistence -------------------------------------------------------------


def _config_to_dict(config: CleanConfig) -> dict:
    return {
        "lemmatizer": config.lemmatizer,
        "strip_emoji": config.strip_emoji,
        "require_english": config.require_english,
        "stopwords": sorted(config.stopword_set),
    }


def _config_from_dict(data: dict) -> CleanConfig:
    return CleanConfig(
        stopword_set=frozenset(data["stopwords"]),
        lemmatizer=data["lemmatizer"],
        strip_emoji=data["strip_emoji"],
        require_english=data["require_english"],
    )


def save_index(index: RecommenderIndex, path) -> None:
    """Versioned text container; identical inputs produce identical bytes."""
    model_text = vectorspace.model_to_text(index.model)
    model_lines = model_text.splitlines()
    lines = [INDEX_TAG]
    lines.append("config " + json.dumps(_config_to_dict(index.config), sort_keys=True))
    lines.append(f"model-lines {len(model_lines)}")
    lines.extend(model_lines)
    lines.append(f"articles {len(index.articles)}")
    for meta in index.articles:
        lines.append(
            json.dumps(
                {
                    "id": meta.id,
                    "title": meta.title,
                    "outlet": meta.outlet,
                    "authors": list(meta.authors),
                },
                sort_keys=True,
            )
        )
    lines.append(f"vectors {len(index.vectors)}")
    for vec in index.vectors:
        lines.append(json.dumps([[i, w.hex()] for i, w in vec.entries]))
    names = sorted(index.profiles)
    lines.append(f"profiles {len(names)}")
    for name in names:
        lines.append(json.dumps(journalist_to_dict(index.profiles[name]), sort_keys=True))
    skipped_ids = sorted(index.skipped)
    lines.append(f"skipped {len(skipped_ids)}")
    for aid in skipped_ids:
        lines.append(json.dumps([aid, index.skipped[aid]]))
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def _take(lines: list[str], pos: int, header: str) -> tuple[int, int]:
    parts = lines[pos].split(" ")
    if parts[0] != header:
        raise InputFileError(f"index container: expected {header!r} at line {pos + 1}")
    return int(parts[1]), pos + 1


def load_index(path) -> RecommenderIndex:
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as exc:
        raise InputFileError(f"cannot read index {path}: {exc}") from exc
    if not lines or lines[0] != INDEX_TAG:
        raise InputFileError(f"not a {INDEX_TAG} container")
    if not lines[1].startswith("config "):
        raise InputFileError("index container: missing config line")
    config = _config_from_dict(json.loads(lines[1][len("config "):]))
    count, pos = _take(lines, 2, "model-lines")
    model = vectorspace.model_from_lines(lines[pos : pos + count])
    pos += count
    count, pos = _take(lines, pos, "articles")
    articles = []
    for line in lines[pos : pos + count]:
        data = json.loads(line)
        articles.append(
            ArticleMeta(
                id=data["id"],
                title=data["title"],
                outlet=data["outlet"],
                authors=tuple(data["authors"]),
            )
        )
    pos += count
    count, pos = _take(lines, pos, "vectors")
    vectors = []
    for line in lines[pos : pos + count]:
        entries = tuple((int(i), float.fromhex(w)) for i, w in json.loads(line))
        vectors.append(SparseVector(entries))
    pos += count
    count, pos = _take(lines, pos, "profiles")
    profiles = {}
    for line in lines[pos : pos + count]:
        profile = journalist_from_dict(json.loads(line))
        profiles[profile.full_name] = profile
    pos += count
    count, pos = _take(lines, pos, "skipped")
    skipped = {}
    for line in lines[pos : pos + count]:
        aid, reason = json.loads(line)
        skipped[aid] = reason
    return RecommenderIndex(
        model=model,
        config=config,
        articles=articles,
        vectors=vectors,
        profiles=profiles,
        skipped=skipped,
    )
