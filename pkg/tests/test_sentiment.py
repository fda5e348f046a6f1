"""Valence scoring and aggregation tests. The shipped lexicon file is parsed
independently here so lookups are checked against the data, not the loader."""

import random
from importlib import resources

import pytest

from pitchlist import sentiment
from pitchlist.sentiment import (
    SentimentStats,
    ValenceLexicon,
    journalist_sentiment,
    load_lexicon,
    outlet_report,
    score,
    topic_report,
)
from pitchlist.corpus import build_journalists

from conftest import make_article


def read_shipped_file():
    text = resources.files("pitchlist").joinpath("data/afinn-111.tsv").read_text("utf-8")
    out = {}
    for line in text.splitlines():
        if line.strip():
            word, valence = line.split("\t")
            out[word] = int(valence)
    return out


@pytest.fixture(scope="module")
def lexicon():
    return load_lexicon()


class TestLexicon:
    def test_shipped_file_matches_loader(self, lexicon):
        raw = read_shipped_file()
        assert lexicon.values == raw

    def test_all_valences_nonzero_in_range(self, lexicon):
        for word, valence in lexicon.values.items():
            assert -5 <= valence <= 5 and valence != 0, word

    def test_empty_lexicon_rejected(self):
        with pytest.raises(ValueError):
            ValenceLexicon({})

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            ValenceLexicon({"x": 6})
        with pytest.raises(ValueError):
            ValenceLexicon({"x": 0})

    def test_custom_file(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("up\t2\ndown\t-2\n")
        lex = load_lexicon(path)
        assert lex.get("up") == 2 and lex.get("down") == -2


class TestScore:
    def test_empty_tokens(self, lexicon):
        assert score([], lexicon) == SentimentStats()

    def test_good_matches_shipped_value(self, lexicon):
        raw = read_shipped_file()
        stats = score(["good"], lexicon)
        assert stats.valence_sum == raw["good"]
        assert stats.positive_word_proportion == 1.0
        assert stats.negative_word_proportion == 0.0
        assert stats.scored_token_count == 1
        assert stats.total_token_count == 1

    def test_good_bad_symmetric(self, lexicon):
        stats = score(["good", "bad"], lexicon)
        assert stats.valence_sum == 0
        assert stats.positive_word_proportion == pytest.approx(0.5)
        assert stats.negative_word_proportion == pytest.approx(0.5)

    def test_unmatched_tokens_dilute_proportions(self, lexicon):
        stats = score(["good", "table", "chair", "lamp"], lexicon)
        assert stats.positive_word_proportion == pytest.approx(0.25)
        assert stats.total_token_count == 4
        assert stats.scored_token_count == 1

    def test_proportions_sum_at_most_one(self, lexicon):
        rng = random.Random(3)
        words = list(lexicon.values)
        for _ in range(50):
            tokens = [rng.choice(words) for _ in range(rng.randint(0, 20))]
            stats = score(tokens, lexicon)
            assert stats.positive_word_proportion + stats.negative_word_proportion <= 1 + 1e-12

    def test_additive_under_concatenation(self, lexicon):
        rng = random.Random(8)
        words = list(lexicon.values) + ["table", "chair", "zzz"]
        for _ in range(100):
            a = [rng.choice(words) for _ in range(rng.randint(0, 15))]
            b = [rng.choice(words) for _ in range(rng.randint(0, 15))]
            assert (
                score(a + b, lexicon).valence_sum
                == score(a, lexicon).valence_sum + score(b, lexicon).valence_sum
            )

    def test_negating_lexicon_negates_and_swaps(self, lexicon):
        negated = ValenceLexicon({w: -v for w, v in lexicon.values.items()})
        tokens = ["good", "bad", "happy", "terrible", "table"]
        normal = score(tokens, lexicon)
        flipped = score(tokens, negated)
        assert flipped.valence_sum == -normal.valence_sum
        assert flipped.positive_word_proportion == pytest.approx(
            normal.negative_word_proportion
        )
        assert flipped.negative_word_proportion == pytest.approx(
            normal.positive_word_proportion
        )


def article_with_words(aid, words, author="Jane Doe", outlet="Daily", topic="tech"):
    return make_article(
        aid, " ".join(words), authors=(author,), outlet=outlet, topic=topic
    )


class TestJournalistSentiment:
    def test_single_article(self, lexicon):
        articles = [article_with_words(0, ["win"])]  # win = +4
        profile = build_journalists(articles, min_articles=1)[0]
        result = journalist_sentiment(profile, {a.id: a for a in articles}, lexicon)
        assert result.mean_valence == pytest.approx(4.0)

    def test_symmetric_articles_average_zero(self, lexicon):
        articles = [
            article_with_words(0, ["good"]),   # +3
            article_with_words(1, ["bad"]),    # -3
        ]
        profile = build_journalists(articles, min_articles=1)[0]
        result = journalist_sentiment(profile, {a.id: a for a in articles}, lexicon)
        assert result.mean_valence == pytest.approx(0.0)

    def test_ten_article_mean_matches_hand_sum(self, lexicon):
        words = ["good", "bad", "happy", "sad", "win", "fail", "love", "hate", "calm", "angry"]
        articles = [article_with_words(i, [words[i]]) for i in range(10)]
        profile = build_journalists(articles, min_articles=1)[0]
        by_id = {a.id: a for a in articles}
        result = journalist_sentiment(profile, by_id, lexicon)
        hand = sum(lexicon.get(w) for w in words) / 10
        assert result.mean_valence == pytest.approx(hand)
        assert len(result.per_article) == 10

    def test_zero_retrievable_articles_error(self, lexicon):
        articles = [article_with_words(0, ["good"])]
        profile = build_journalists(articles, min_articles=1)[0]
        with pytest.raises(ValueError):
            journalist_sentiment(profile, {}, lexicon)

    def test_mean_within_article_extremes(self, lexicon):
        rng = random.Random(5)
        words = list(lexicon.values)
        articles = [
            article_with_words(i, [rng.choice(words) for _ in range(rng.randint(1, 6))])
            for i in range(8)
        ]
        profile = build_journalists(articles, min_articles=1)[0]
        result = journalist_sentiment(profile, {a.id: a for a in articles}, lexicon)
        sums = [s.valence_sum for s in result.per_article.values()]
        assert min(sums) <= result.mean_valence <= max(sums)


class TestOutletReport:
    def test_ranked_by_count_then_name(self, lexicon):
        articles = []
        n = 0
        for count, name in ((12, "Carol Count"), (10, "Bob Beta"), (10, "Alice Alpha")):
            for _ in range(count):
                articles.append(article_with_words(n, ["good"], author=name))
                n += 1
        profiles = build_journalists(articles, min_articles=1)
        rows = outlet_report("Daily", profiles, {a.id: a for a in articles}, lexicon)
        assert [r.journalist for r in rows] == ["Carol Count", "Alice Alpha", "Bob Beta"]
        assert rows[0].article_count == 12

    def test_single_journalist_outlet(self, lexicon):
        articles = [article_with_words(0, ["good"])]
        profiles = build_journalists(articles, min_articles=1)
        rows = outlet_report("Daily", profiles, {a.id: a for a in articles}, lexicon)
        assert len(rows) == 1

    def test_unknown_outlet_error(self, lexicon):
        articles = [article_with_words(0, ["good"])]
        profiles = build_journalists(articles, min_articles=1)
        with pytest.raises(ValueError):
            outlet_report("Nope", profiles, {a.id: a for a in articles}, lexicon)


class TestTopicReport:
    def test_five_topic_breakdown(self, lexicon):
        topics = ("sports", "politics", "entertainment", "tech", "business")
        articles = [
            article_with_words(i, ["good", "good"], topic=t) for i, t in enumerate(topics)
        ]
        rows = topic_report(articles, lexicon)
        assert [r.topic for r in rows] == list(topics)
        for row in rows:
            assert row.article_count == 1
            assert row.valence_sum == 2 * lexicon.get("good")

    def test_reports_both_sums_and_proportions(self, lexicon):
        articles = [article_with_words(0, ["good", "table"], topic="tech")]
        row = topic_report(articles, lexicon)[0]
        assert row.valence_sum == lexicon.get("good")
        assert row.mean_positive_proportion == pytest.approx(0.5)

    def test_csv_shapes(self, lexicon):
        articles = [article_with_words(0, ["good"], topic="tech")]
        rows = topic_report(articles, lexicon)
        text = sentiment.topic_report_csv(rows)
        assert text.splitlines()[0].startswith("topic,article_count,valence_sum")
        profiles = build_journalists(articles, min_articles=1)
        orows = outlet_report("Daily", profiles, {a.id: a for a in articles}, lexicon)
        otext = sentiment.outlet_report_csv(orows)
        assert otext.splitlines()[0] == "journalist,article_count,mean_valence"
