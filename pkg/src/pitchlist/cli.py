"""Command-line surface: ingest data, build and query the recommender, run
the matchers, linkers, classifiers, and reports.

Settings resolve as flags > config file > defaults. The config file is flat
key=value text (# starts a comment). Machine-readable output goes to the
--output file; stdout carries a human summary, or the machine document when
--format structured is chosen. Exit status is 0 on success, 1 on a runtime
failure (one-line diagnostic on stderr), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import corpus, linkage, matching, recommend, sentiment, taxonomy
from .errors import PitchlistError
from .textprep import CleanConfig, LEMMATIZER_MODES, clean

DEFAULTS = {
    "articles_format": "csv",
    "min_articles": 10,
    "fuzzy_threshold": matching.FUZZY_THRESHOLD,
    "linkage_threshold": linkage.LINKAGE_THRESHOLD,
    "comparator": "levenshtein",
    "nb_tau": taxonomy.NB_TAU,
    "alpha": 1.0,
    "recommend_k": recommend.DEFAULT_K,
    "knn_k": taxonomy.KNN_K,
    "ngram_n": 3,
    "seed": 0,
    "lemmatizer": "dictionary-pos",
}

PATH_KEYS = (
    "articles", "journalists", "sitemap", "emails", "domains", "oracle",
    "lexicon", "taxonomy", "beat_mapping", "index", "train", "text",
    "predictions", "truth", "beats",
)


class UsageError(PitchlistError):
    pass


def load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as f:
            for raw in f:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"config line without '=': {raw.strip()!r}")
                key, value = line.split("=", 1)
                values[key.strip()] = value.strip()
        return values
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc


class Settings:
    """Flag > config file > default resolution, with range/path validation."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        self._file = {}
        if self._args.get("config"):
            self._file = load_config_file(self._args["config"])

    def get(self, key: str, cast=str, default=None):
        flag = self._args.get(key)
        if flag is not None:
            return flag
        if key in self._file:
            raw = self._file[key]
            if cast is bool:
                return raw.lower() in ("1", "true", "yes", "on")
            return cast(raw)
        if key in DEFAULTS:
            return DEFAULTS[key]
        return default

    def path(self, key: str, required: bool = True) -> str | None:
        value = self.get(key)
        if value is None:
            if required:
                raise UsageError(f"missing required input: --{key.replace('_', '-')}")
            return None
        if not os.path.exists(value):
            raise UsageError(f"input file not found: {value}")
        return value

    def fraction(self, key: str) -> float:
        raw = self.get(key, cast=float)
        if raw is None:
            raise UsageError(f"missing required setting: --{key.replace('_', '-')}")
        value = float(raw)
        if not 0.0 <= value <= 1.0:
            raise UsageError(f"{key} must lie in [0, 1], got {value}")
        return value

    def positive_int(self, key: str) -> int:
        raw = self.get(key, cast=int)
        if raw is None:
            raise UsageError(f"missing required setting: --{key.replace('_', '-')}")
        value = int(raw)
        if value < 1:
            raise UsageError(f"{key} must be >= 1, got {value}")
        return value

    def check_referenced_paths(self) -> None:
        """Every input path named by flag or config must exist up front."""
        for key in PATH_KEYS:
            value = self.get(key)
            if value is not None and not os.path.exists(value):
                raise UsageError(f"input file not found: {value}")


def _emit(settings: Settings, machine: str, human: str) -> None:
    output = settings.get("output")
    if output:
        with open(output, "w", encoding="utf-8") as f:
            f.write(machine)
    if settings.get("format", default="text") == "structured":
        sys.stdout.write(machine if machine.endswith("\n") else machine + "\n")
    else:
        sys.stdout.write(human if human.endswith("\n") else human + "\n")


def _json_doc(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _read_text_input(settings: Settings) -> str:
    query = settings.get("query")
    if query is not None:
        return query
    path = settings.path("text")
    with open(path, encoding="utf-8") as f:
        return f.read()


def _clean_config(settings: Settings) -> CleanConfig:
    mode = settings.get("lemmatizer")
    if mode not in LEMMATIZER_MODES:
        raise UsageError(f"unknown lemmatizer mode {mode!r}")
    return CleanConfig(lemmatizer=mode)


def _load_articles(settings: Settings):
    path = settings.path("articles")
    fmt = settings.get("articles_format")
    if fmt not in ("csv", "jsonl"):
        raise UsageError(f"articles format must be csv or jsonl, got {fmt!r}")
    return corpus.load_articles(path, format=fmt)


def _journalists(settings: Settings, articles) -> list:
    path = settings.get("journalists")
    if path is not None:
        return corpus.read_journalists(settings.path("journalists"))
    return corpus.build_journalists(articles, settings.positive_int("min_articles"))


# --- subcommand handlers -----------------------------------------------------


def cmd_ingest(settings: Settings) -> None:
    articles, report = _load_articles(settings)
    profiles = corpus.build_journalists(articles, settings.positive_int("min_articles"))
    payload = {
        "rows": report.total_rows,
        "articles_loaded": report.loaded,
        "articles_rejected": report.rejected,
        "reject_reasons": dict(sorted(report.reasons.items())),
        "journalists": len(profiles),
    }
    output = settings.get("output")
    if output:
        corpus.write_journalists(profiles, output)
    human = (
        f"loaded {report.loaded}/{report.total_rows} articles "
        f"({report.rejected} rejected); {len(profiles)} journalists"
        + (f" -> {output}" if output else "")
    )
    if settings.get("format", default="text") == "structured":
        sys.stdout.write(_json_doc(payload))
    else:
        sys.stdout.write(human + "\n")


def cmd_build_index(settings: Settings) -> None:
    articles, report = _load_articles(settings)
    profiles = _journalists(settings, articles)
    index = recommend.build_index(articles, profiles, _clean_config(settings))
    output = settings.get("output")
    if not output:
        raise UsageError("build-index requires --output for the index file")
    recommend.save_index(index, output)
    payload = {
        "indexed_articles": len(index),
        "skipped_articles": dict(sorted(index.skipped.items())),
        "vocabulary_terms": len(index.model.vocabulary),
        "journalists": len(index.profiles),
        "index_path": output,
    }
    human = (
        f"indexed {len(index)} articles ({len(index.skipped)} skipped), "
        f"{len(index.model.vocabulary)} terms, {len(index.profiles)} journalists "
        f"-> {output}"
    )
    if settings.get("format", default="text") == "structured":
        sys.stdout.write(_json_doc(payload))
    else:
        sys.stdout.write(human + "\n")


def cmd_recommend(settings: Settings) -> None:
    index = recommend.load_index(settings.path("index"))
    text = _read_text_input(settings)
    k = settings.positive_int("recommend_k")
    recs = recommend.recommend(index, text, k=k)
    machine = _json_doc(recommend.recommendations_to_dict(recs))
    lines = [f"{len(recs)} journalist(s) for this release:"]
    for rec in recs:
        contacts = ", ".join(f"{k2}={v}" for k2, v in rec.contacts.items()) or "none"
        lines.append(
            f"  {rec.journalist.full_name}  similarity={rec.best_similarity:.4f}  "
            f"contacts: {contacts}"
        )
        for e in rec.evidence:
            lines.append(f"    [{e.similarity:.4f}] {e.title or e.article_id} ({e.outlet})")
    _emit(settings, machine, "\n".join(lines))


def cmd_match_profiles(settings: Settings) -> None:
    profiles = corpus.read_journalists(settings.path("journalists"))
    with open(settings.path("sitemap"), encoding="utf-8") as f:
        entries = [line.strip() for line in f if line.strip()]
    links, report = matching.link_profiles(
        profiles,
        entries,
        threshold=settings.fraction("fuzzy_threshold"),
        n=settings.positive_int("ngram_n"),
    )
    update = settings.get("update")
    if update:
        url_by_name = {l.journalist: l.url for l in links if l.url}
        for profile in profiles:
            if profile.full_name in url_by_name:
                profile.muckrack_url = url_by_name[profile.full_name]
        corpus.write_journalists(profiles, update)
    rows = ["journalist,slug,outcome,url,score"]
    for link in links:
        name = f'"{link.journalist}"' if "," in link.journalist else link.journalist
        rows.append(
            f"{name},{link.slug},{link.outcome},{link.url or ''},{link.score:.6f}"
        )
    machine = "\n".join(rows) + "\n"
    human = (
        f"linked {report.exact} exact + {report.fuzzy} fuzzy of {report.total}; "
        f"{report.unresolved} unresolved"
        + (f"; profiles updated -> {update}" if update else "")
    )
    _emit(settings, machine, human)


def cmd_link_emails(settings: Settings) -> None:
    profiles = corpus.read_journalists(settings.path("journalists"))
    emails, email_report = corpus.load_emails(settings.path("emails"))
    domains = linkage.load_domain_table(settings.path("domains"))
    comparator = settings.get("comparator")
    result = linkage.link_emails(
        profiles,
        emails,
        domains,
        threshold=settings.fraction("linkage_threshold"),
        comparator=comparator,
    )
    matches = result.matches
    summary_text = ""
    oracle_path = settings.get("oracle")
    if oracle_path:
        oracle = linkage.load_oracle(settings.path("oracle"))
        matches, summary = linkage.label_matches(matches, oracle)
        summary_text = (
            f"; labels true/false/invalid = {summary.counts['true']}"
            f"/{summary.counts['false']}/{summary.counts['invalid']}"
        )
    update = settings.get("update")
    if update:
        email_by_name = {m.journalist: m.email for m in matches if m.label != "false"}
        for profile in profiles:
            if profile.full_name in email_by_name:
                profile.email = email_by_name[profile.full_name]
        corpus.write_journalists(profiles, update)
    machine = linkage.matches_csv(matches)
    human = (
        f"{len(matches)} matches from {result.comparisons} comparisons "
        f"({len(result.skipped)} journalists skipped, "
        f"{email_report.rejected} bad email rows){summary_text}"
        + (f"; profiles updated -> {update}" if update else "")
    )
    _emit(settings, machine, human)


def cmd_sentiment_report(settings: Settings) -> None:
    articles, _ = _load_articles(settings)
    lexicon_path = settings.get("lexicon")
    lexicon = sentiment.load_lexicon(
        settings.path("lexicon") if lexicon_path else None
    )
    mode = settings.get("mode", default="topics")
    if mode == "topics":
        rows = sentiment.topic_report(articles, lexicon)
        machine = sentiment.topic_report_csv(rows)
        human = "\n".join(
            f"{r.topic}: {r.article_count} articles, mean valence {r.mean_valence:+.2f}"
            for r in rows
        ) or "no articles"
    elif mode == "outlet":
        outlet = settings.get("outlet")
        if not outlet:
            raise UsageError("sentiment-report --mode outlet requires --outlet")
        profiles = _journalists(settings, articles)
        by_id = {a.id: a for a in articles}
        rows = sentiment.outlet_report(outlet, profiles, by_id, lexicon)
        machine = sentiment.outlet_report_csv(rows)
        human = "\n".join(
            f"{r.journalist}: {r.article_count} articles, mean valence {r.mean_valence:+.2f}"
            for r in rows
        )
    else:
        raise UsageError(f"unknown sentiment mode {mode!r} (topics|outlet)")
    _emit(settings, machine, human)


def _read_labeled_jsonl(path) -> tuple[list[list[str]], list[taxonomy.TierLabelSet]]:
    docs: list[list[str]] = []
    labels: list[taxonomy.TierLabelSet] = []
    config = CleanConfig()
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "tokens" in record:
                docs.append([str(t) for t in record["tokens"]])
            else:
                docs.append(list(clean(record.get("text", ""), config)))
            labels.append(taxonomy.TierLabelSet.from_lists(record))
    return docs, labels


def _read_tier_jsonl(path) -> list[taxonomy.TierLabelSet]:
    sets = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                sets.append(taxonomy.TierLabelSet.from_lists(json.loads(line)))
    return sets


def cmd_classify(settings: Settings) -> None:
    docs, labels = _read_labeled_jsonl(settings.path("train"))
    tree = None
    if settings.get("taxonomy"):
        tree = taxonomy.load_taxonomy(settings.path("taxonomy"))
    text = _read_text_input(settings)
    doc = list(clean(text, CleanConfig()))
    classifier_kind = settings.get("classifier", default="nb")
    if classifier_kind == "nb":
        clf = taxonomy.train_nb(
            docs, labels, alpha=float(settings.get("alpha", cast=float)), tree=tree
        )
        predicted = taxonomy.predict_nb(clf, doc, tau=settings.fraction("nb_tau"))
    elif classifier_kind == "knn":
        clf = taxonomy.train_knn(docs, labels)
        predicted = taxonomy.predict_knn(clf, doc, k=settings.positive_int("knn_k"))
    else:
        raise UsageError(f"unknown classifier {classifier_kind!r} (nb|knn)")
    machine = _json_doc(predicted.as_dict())
    human = "; ".join(
        f"tier{t}: {', '.join(sorted(predicted.tier(t))) or '-'}" for t in taxonomy.TIERS
    )
    _emit(settings, machine, human)


def cmd_evaluate(settings: Settings) -> None:
    mode = settings.get("mode", default="metrics")
    if mode == "metrics":
        predictions = _read_tier_jsonl(settings.path("predictions"))
        truth = _read_tier_jsonl(settings.path("truth"))
        report = taxonomy.evaluate(predictions, truth)
        machine = _json_doc(report.as_dict())
        human = (
            f"accuracy {report.accuracy:.4f}; "
            f"micro P/R/F1 {report.micro_precision:.4f}/{report.micro_recall:.4f}/"
            f"{report.micro_f1:.4f}; macro F1 {report.macro_f1:.4f}; "
            f"weighted F1 {report.weighted_f1:.4f}"
        )
    elif mode == "beats":
        predictions = _read_tier_jsonl(settings.path("predictions"))
        beats: list[list[str]] = []
        with open(settings.path("beats"), encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    beats.append(list(json.loads(line).get("beats", [])))
        mapping = taxonomy.load_beat_mapping(settings.path("beat_mapping"))
        result = taxonomy.beat_tier_eval(
            [p.tier1 for p in predictions], beats, mapping
        )
        machine = _json_doc(
            {
                "accuracy": result.accuracy,
                "evaluated": result.evaluated,
                "correct": result.correct,
                "skipped_no_beats": result.skipped_no_beats,
            }
        )
        human = (
            f"beat-tier accuracy {result.accuracy:.4f} "
            f"({result.correct}/{result.evaluated} correct, "
            f"{result.skipped_no_beats} skipped)"
        )
    else:
        raise UsageError(f"unknown evaluate mode {mode!r} (metrics|beats)")
    _emit(settings, machine, human)


def cmd_benchmark_matchers(settings: Settings) -> None:
    corpus_size = settings.positive_int("corpus_size")
    queries_raw = settings.get("queries", default="1,10,100")
    try:
        query_counts = [int(q) for q in str(queries_raw).split(",") if q.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --queries value {queries_raw!r}") from exc
    if not query_counts or any(q < 1 for q in query_counts):
        raise UsageError(f"--queries needs positive counts, got {queries_raw!r}")
    result = matching.benchmark_matchers(
        corpus_size,
        query_counts,
        seed=int(settings.get("seed", cast=int)),
        n=settings.positive_int("ngram_n"),
        threshold=settings.fraction("fuzzy_threshold"),
    )
    machine = matching.benchmark_rows_csv(result)
    lines = [
        f"{method}: {queries} queries over {size} entries in {seconds:.3f}s"
        for method, size, queries, seconds in result.rows
    ]
    lines.append(f"best-candidate agreement (ratio>=90): {result.agreement():.3f}")
    _emit(settings, machine, "\n".join(lines))


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pitchlist",
        description="Recommend journalists for press releases and run the "
        "supporting matching, linkage, sentiment, and classification tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--output", help="write machine-readable output here")
        p.add_argument(
            "--format", choices=("text", "structured"),
            help="stdout style: human text (default) or the machine document",
        )

    p = sub.add_parser("ingest", help="load and validate articles, build journalist profiles")
    common(p)
    p.add_argument("--articles")
    p.add_argument("--articles-format", dest="articles_format", choices=("csv", "jsonl"))
    p.add_argument("--min-articles", dest="min_articles", type=int)

    p = sub.add_parser("build-index", help="build the recommender index")
    common(p)
    p.add_argument("--articles")
    p.add_argument("--articles-format", dest="articles_format", choices=("csv", "jsonl"))
    p.add_argument("--journalists", help="profiles JSONL (else derived from articles)")
    p.add_argument("--min-articles", dest="min_articles", type=int)
    p.add_argument("--lemmatizer", choices=LEMMATIZER_MODES)

    p = sub.add_parser("recommend", help="recommend journalists for a press release")
    common(p)
    p.add_argument("--index")
    p.add_argument("--text", help="press release file")
    p.add_argument("--query", help="press release text inline")
    p.add_argument("--k", dest="recommend_k", type=int)

    p = sub.add_parser("match-profiles", help="link journalists to sitemap profile URLs")
    common(p)
    p.add_argument("--journalists")
    p.add_argument("--sitemap")
    p.add_argument("--threshold", dest="fuzzy_threshold", type=float)
    p.add_argument("--ngram-n", dest="ngram_n", type=int)
    p.add_argument("--update", help="write profiles with linked URLs to this JSONL")

    p = sub.add_parser("link-emails", help="record-link journalists to the email dataset")
    common(p)
    p.add_argument("--journalists")
    p.add_argument("--emails")
    p.add_argument("--domains", help="outlet,domain CSV")
    p.add_argument("--threshold", dest="linkage_threshold", type=float)
    p.add_argument("--comparator", choices=linkage.COMPARATORS)
    p.add_argument("--oracle", help="journalist_full_name,email CSV for labeling")
    p.add_argument("--update", help="write profiles with matched emails to this JSONL")

    p = sub.add_parser("sentiment-report", help="valence aggregates by topic or outlet")
    common(p)
    p.add_argument("--articles")
    p.add_argument("--articles-format", dest="articles_format", choices=("csv", "jsonl"))
    p.add_argument("--mode", choices=("topics", "outlet"))
    p.add_argument("--outlet")
    p.add_argument("--lexicon", help="word<TAB>valence file (default: shipped AFINN-111)")
    p.add_argument("--journalists")
    p.add_argument("--min-articles", dest="min_articles", type=int)

    p = sub.add_parser("classify", help="train on a fixture and classify a text")
    common(p)
    p.add_argument("--train", help="JSONL with text/tokens and tier1..tier4 arrays")
    p.add_argument("--taxonomy", help="taxonomy CSV for label validation")
    p.add_argument("--classifier", choices=("nb", "knn"))
    p.add_argument("--text")
    p.add_argument("--query")
    p.add_argument("--tau", dest="nb_tau", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--k", dest="knn_k", type=int)

    p = sub.add_parser("evaluate", help="metric suite or beat-tier accuracy")
    common(p)
    p.add_argument("--mode", choices=("metrics", "beats"))
    p.add_argument("--predictions")
    p.add_argument("--truth")
    p.add_argument("--beats", help="JSONL with per-article beats arrays")
    p.add_argument("--beat-mapping", dest="beat_mapping")

    p = sub.add_parser("benchmark-matchers", help="time edit-distance vs n-gram matching")
    common(p)
    p.add_argument("--corpus-size", dest="corpus_size", type=int)
    p.add_argument("--queries", help="comma-separated query counts (default 1,10,100)")
    p.add_argument("--seed", type=int)
    p.add_argument("--ngram-n", dest="ngram_n", type=int)
    p.add_argument("--threshold", dest="fuzzy_threshold", type=float)

    return parser


HANDLERS = {
    "ingest": cmd_ingest,
    "build-index": cmd_build_index,
    "recommend": cmd_recommend,
    "match-profiles": cmd_match_profiles,
    "link-emails": cmd_link_emails,
    "sentiment-report": cmd_sentiment_report,
    "classify": cmd_classify,
    "evaluate": cmd_evaluate,
    "benchmark-matchers": cmd_benchmark_matchers,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings(args)
        settings.check_referenced_paths()
        HANDLERS[args.command](settings)
    except (PitchlistError, OSError, ValueError) as exc:
        print(f"pitchlist {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
