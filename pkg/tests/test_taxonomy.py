"""Taxonomy tree, Naive Bayes (with a direct probability-space oracle), KNN
voting, metric suite, and beat-tier evaluation tests."""

import math
import random
from collections import Counter
from importlib import resources

import pytest

from pitchlist.taxonomy import (
    TaxonomyError,
    TaxonomyNode,
    TaxonomyTree,
    TierLabelSet,
    beat_tier_eval,
    evaluate,
    load_beat_mapping,
    load_taxonomy,
    posterior,
    predict_knn,
    predict_nb,
    train_knn,
    train_nb,
)


def tier1(*labels):
    return TierLabelSet(tier1=frozenset(labels))


def shipped_path(name):
    return resources.files("pitchlist").joinpath(f"data/{name}")


class TestTaxonomyTree:
    def test_shipped_file_loads(self, tmp_path):
        path = tmp_path / "tax.csv"
        path.write_bytes(shipped_path("iab_taxonomy.csv").read_bytes())
        tree = load_taxonomy(path)
        assert len(tree.roots()) == 38
        assert "Education" in tree

    def test_education_chain_representable(self, tmp_path):
        path = tmp_path / "tax.csv"
        path.write_bytes(shipped_path("iab_taxonomy.csv").read_bytes())
        tree = load_taxonomy(path)
        by_name = {n.name: n for n in tree.nodes.values()}
        professional = by_name["Professional School"]
        chain = [n.name for n in tree.path(professional.id)]
        assert chain == [
            "Education",
            "College Education",
            "Standardized Testing",
            "Professional School",
        ]
        assert [tree.nodes[n.id].tier for n in tree.path(professional.id)] == [1, 2, 3, 4]

    def test_tier_mismatch_rejected(self):
        nodes = [
            TaxonomyNode("1", "Root", 1, None),
            TaxonomyNode("2", "Deep", 3, "1"),
        ]
        with pytest.raises(TaxonomyError) as err:
            TaxonomyTree(nodes)
        assert "2" in str(err.value)

    def test_unknown_parent_rejected(self):
        with pytest.raises(TaxonomyError):
            TaxonomyTree([TaxonomyNode("1", "Kid", 2, "ghost")])

    def test_tier1_with_parent_rejected(self):
        nodes = [
            TaxonomyNode("1", "Root", 1, None),
            TaxonomyNode("2", "Odd", 1, "1"),
        ]
        with pytest.raises(TaxonomyError):
            TaxonomyTree(nodes)

    def test_empty_rejected(self):
        with pytest.raises(TaxonomyError):
            TaxonomyTree([])

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "tax.csv"
        path.write_text("id,name,tier,parent_id\n")
        with pytest.raises(TaxonomyError):
            load_taxonomy(path)

    def test_duplicate_id_rejected(self):
        nodes = [TaxonomyNode("1", "A", 1, None), TaxonomyNode("1", "B", 1, None)]
        with pytest.raises(TaxonomyError):
            TaxonomyTree(nodes)

    def test_children_lookup(self):
        nodes = [
            TaxonomyNode("1", "Root", 1, None),
            TaxonomyNode("2", "Kid", 2, "1"),
        ]
        tree = TaxonomyTree(nodes)
        assert [n.id for n in tree.children("1")] == ["2"]


def nb_fixture_4docs():
    """4 docs over a 5-term vocabulary with two tier-1 labels."""
    docs = [
        ["ball", "goal", "team"],
        ["ball", "match"],
        ["vote", "law"],
        ["vote", "law", "team"],
    ]
    labels = [tier1("Sports"), tier1("Sports"), tier1("Politics"), tier1("Politics")]
    return docs, labels


def direct_bayes_posterior(docs, labels, label, tier, doc, alpha=1.0):
    """Probability-space Bayes: P(A|B) = P(A) P(B|A) / P(B)."""
    vocab = sorted({t for d in docs for t in d})
    positive = [d for d, ls in zip(docs, labels) if label in ls.tier(tier)]
    negative = [d for d, ls in zip(docs, labels) if label not in ls.tier(tier)]

    def likelihood(cls_docs, target):
        counts = Counter(t for d in cls_docs for t in d)
        total = sum(counts.values())
        prob = 1.0
        for t in target:
            if t not in vocab:
                continue
            prob *= (counts[t] + alpha) / (total + alpha * len(vocab))
        return prob

    p_a = len(positive) / len(docs)
    p_b_given_a = likelihood(positive, doc)
    p_b_given_not_a = likelihood(negative, doc)
    p_b = p_a * p_b_given_a + (1 - p_a) * p_b_given_not_a
    return p_a * p_b_given_a / p_b


class TestNaiveBayes:
    def test_two_doc_fixture_matches_hand_bayes_rule(self):
        docs = [["alpha"], ["beta"]]
        labels = [tier1("A"), tier1("B")]
        clf = train_nb(docs, labels)
        posts = posterior(clf, ["alpha"])
        # P(A|alpha) = (0.5 * 2/3) / (0.5 * 2/3 + 0.5 * 1/3) = 2/3
        assert posts["A"] == pytest.approx(2 / 3, abs=1e-12)
        assert posts["B"] == pytest.approx(1 / 3, abs=1e-12)
        assert posts["A"] > 0.5

    def test_smoothing_formula_for_unseen_term(self):
        docs = [["alpha"], ["beta"]]
        labels = [tier1("A"), tier1("B")]
        clf = train_nb(docs, labels, alpha=1.0)
        model = clf.models["A"]
        # class A saw 1 token over a 2-term vocabulary: unseen beta gets 1/(1+2)
        assert math.exp(model.log_prob_pos["beta"]) == pytest.approx(1 / 3, abs=1e-12)
        assert math.exp(model.log_prob_pos["alpha"]) == pytest.approx(2 / 3, abs=1e-12)

    def test_log_space_equals_direct_bayes_on_4doc_fixture(self):
        docs, labels = nb_fixture_4docs()
        clf = train_nb(docs, labels)
        for doc in docs + [["ball"], ["vote"], ["team", "team"], []]:
            posts = posterior(clf, doc)
            for label in ("Sports", "Politics"):
                direct = direct_bayes_posterior(docs, labels, label, 1, doc)
                assert posts[label] == pytest.approx(direct, abs=1e-9)

    def test_contradictory_labels_stay_near_prior(self):
        docs = [["same", "words"], ["same", "words"]]
        labels = [tier1("A"), tier1("B")]
        clf = train_nb(docs, labels)
        posts = posterior(clf, ["same"])
        assert posts["A"] == pytest.approx(0.5, abs=1e-9)
        assert posts["B"] == pytest.approx(0.5, abs=1e-9)

    def test_per_label_term_probabilities_sum_to_one(self):
        docs, labels = nb_fixture_4docs()
        clf = train_nb(docs, labels)
        for model in clf.models.values():
            assert sum(math.exp(p) for p in model.log_prob_pos.values()) == pytest.approx(
                1.0, abs=1e-9
            )
            assert sum(math.exp(p) for p in model.log_prob_neg.values()) == pytest.approx(
                1.0, abs=1e-9
            )

    def test_misaligned_inputs_rejected(self):
        with pytest.raises(ValueError):
            train_nb([["a"]], [])

    def test_zero_positive_label_dropped_with_warning(self):
        docs = [["a"], ["b"]]
        labels = [tier1("A"), tier1("A")]
        with pytest.warns(UserWarning):
            clf = train_nb(docs, labels, label_universe=["A", "Ghost"])
        assert set(clf.models) == {"A"}

    def test_tree_validation(self, tmp_path):
        path = tmp_path / "tax.csv"
        path.write_text("id,name,tier,parent_id\n1,Sports,1,\n")
        tree = load_taxonomy(path)
        train_nb([["a"]], [tier1("Sports")], tree=tree)
        with pytest.raises(TaxonomyError):
            train_nb([["a"]], [tier1("Quantum")], tree=tree)


class TestPredictNb:
    def test_discriminative_term_selects_class(self):
        docs = [["alpha"], ["beta"]]
        labels = [tier1("A"), tier1("B")]
        clf = train_nb(docs, labels)
        assert predict_nb(clf, ["alpha"]).tier1 == frozenset({"A"})

    def test_tau_zero_includes_every_label(self):
        docs, labels = nb_fixture_4docs()
        clf = train_nb(docs, labels)
        predicted = predict_nb(clf, ["ball"], tau=0.0)
        assert predicted.tier1 == frozenset({"Sports", "Politics"})

    def test_tau_above_one_falls_back_to_top1_per_tier(self):
        docs, labels = nb_fixture_4docs()
        clf = train_nb(docs, labels)
        predicted = predict_nb(clf, ["ball"], tau=1.0001)
        assert predicted.tier1 == frozenset({"Sports"})

    def test_empty_doc_uses_prior_fallback(self):
        docs = [["alpha"], ["alpha", "beta"], ["beta"], ["gamma"]]
        labels = [tier1("A"), tier1("A"), tier1("B"), tier1("C")]
        clf = train_nb(docs, labels)
        predicted = predict_nb(clf, [])
        # priors 0.5 / 0.25 / 0.25: A reaches tau=0.5, others fall away
        assert predicted.tier1 == frozenset({"A"})

    def test_multitier_labels_fill_their_slots(self):
        docs = [["ball"], ["vote"]]
        labels = [
            TierLabelSet(tier1=frozenset({"Sports"}), tier2=frozenset({"Soccer"})),
            TierLabelSet(tier1=frozenset({"Politics"})),
        ]
        clf = train_nb(docs, labels)
        predicted = predict_nb(clf, ["ball"])
        assert predicted.tier1 == frozenset({"Sports"})
        assert predicted.tier2 == frozenset({"Soccer"})
        assert predicted.tier3 == frozenset()


class TestKnn:
    def test_unanimous_duplicate_neighbors(self):
        labels = TierLabelSet(tier1=frozenset({"Sports"}), tier2=frozenset({"Soccer"}))
        docs = [["ball", "goal"], ["ball", "goal"], ["ball", "goal"], ["vote", "law"]]
        all_labels = [labels, labels, labels, tier1("Politics")]
        clf = train_knn(docs, all_labels)
        predicted = predict_knn(clf, ["ball", "goal"], k=3)
        assert predicted == labels

    def test_majority_vote_with_fallback(self):
        # neighbors carry {A,B}, {A}, {C}: A has the 2-of-3 majority
        docs = [["x", "x", "q"], ["x", "q", "q"], ["x", "q", "z"], ["far", "away"]]
        all_labels = [
            TierLabelSet(tier1=frozenset({"A", "B"})),
            tier1("A"),
            tier1("C"),
            tier1("D"),
        ]
        clf = train_knn(docs, all_labels)
        predicted = predict_knn(clf, ["x", "q"], k=3)
        assert predicted.tier1 == frozenset({"A"})

    def test_tier_without_majority_uses_nearest(self):
        docs = [["x", "x"], ["x", "q"], ["q", "z"]]
        all_labels = [
            TierLabelSet(tier1=frozenset({"A"}), tier2=frozenset({"A2"})),
            TierLabelSet(tier1=frozenset({"A"}), tier2=frozenset({"B2"})),
            TierLabelSet(tier1=frozenset({"A"}), tier2=frozenset({"C2"})),
        ]
        clf = train_knn(docs, all_labels)
        predicted = predict_knn(clf, ["x", "x"], k=3)
        assert predicted.tier1 == frozenset({"A"})
        # tier2 has three singleton votes: fall back to the nearest neighbor
        assert predicted.tier2 == frozenset({"A2"})

    def test_k_clamped_with_warning(self):
        docs = [["a"], ["b"]]
        labels = [tier1("A"), tier1("B")]
        clf = train_knn(docs, labels)
        with pytest.warns(UserWarning):
            predicted = predict_knn(clf, ["a"], k=3)
        assert predicted.tier1  # both docs vote; nearest fallback applies

    def test_k_must_be_positive(self):
        clf = train_knn([["a"]], [tier1("A")])
        with pytest.raises(ValueError):
            predict_knn(clf, ["a"], k=0)


class TestEvaluate:
    def test_perfect_predictions_all_ones(self):
        truth = [tier1("A"), tier1("B"), TierLabelSet(tier2=frozenset({"C"}))]
        report = evaluate(truth, truth)
        for value in (
            report.accuracy,
            report.macro_precision, report.macro_recall, report.macro_f1,
            report.micro_precision, report.micro_recall, report.micro_f1,
            report.weighted_precision, report.weighted_recall, report.weighted_f1,
        ):
            assert value == 1.0

    def test_hand_checked_two_sample_example(self):
        truth = [tier1("A"), tier1("B")]
        predictions = [tier1("A"), tier1("A")]
        report = evaluate(predictions, truth)
        assert report.accuracy == 0.5
        assert report.micro_precision == 0.5
        assert report.micro_recall == 0.5
        assert report.macro_f1 == pytest.approx(1 / 3, abs=0)
        # label A: P=1/2 R=1 F1=2/3; label B: all zero
        assert report.macro_precision == pytest.approx(0.25)
        assert report.macro_recall == pytest.approx(0.5)
        assert report.weighted_f1 == pytest.approx(1 / 3)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            evaluate([tier1("A")], [])

    def test_zero_support_labels_excluded_and_reported(self):
        truth = [tier1("A")]
        predictions = [tier1("A", "Ghost")]
        report = evaluate(predictions, truth)
        assert report.zero_support_labels == ("Ghost",)
        assert report.macro_precision == 1.0  # only label A averaged
        assert report.micro_precision == 0.5  # Ghost still counts as FP in micro

    def test_f1_is_harmonic_mean_per_mode(self):
        rng = random.Random(11)
        labels = ["A", "B", "C", "D"]
        truth, predictions = [], []
        for _ in range(40):
            truth.append(tier1(*rng.sample(labels, rng.randint(1, 3))))
            predictions.append(tier1(*rng.sample(labels, rng.randint(0, 3))))
        report = evaluate(predictions, truth)
        p, r = report.micro_precision, report.micro_recall
        expected = 0.0 if p + r == 0 else 2 * p * r / (p + r)
        assert report.micro_f1 == pytest.approx(expected, abs=1e-9)
        for value in report.as_dict().values():
            if isinstance(value, float):
                assert 0.0 <= value <= 1.0

    def test_micro_equals_pooled_confusion_counts(self):
        rng = random.Random(5)
        labels = ["A", "B", "C"]
        truth, predictions = [], []
        for _ in range(30):
            truth.append(tier1(*rng.sample(labels, rng.randint(1, 2))))
            predictions.append(tier1(*rng.sample(labels, rng.randint(0, 2))))
        report = evaluate(predictions, truth)
        tp = fp = fn = 0
        for p, t in zip(predictions, truth):
            tp += len(p.all_labels() & t.all_labels())
            fp += len(p.all_labels() - t.all_labels())
            fn += len(t.all_labels() - p.all_labels())
        assert report.micro_precision == pytest.approx(tp / (tp + fp))
        assert report.micro_recall == pytest.approx(tp / (tp + fn))


class TestBeatTierEval:
    MAPPING = {
        "Tech": frozenset({"Technology"}),
        "Sports": frozenset({"Sports"}),
        "Politics": frozenset({"Politics", "Law"}),
    }

    def test_intersection_rules(self):
        result = beat_tier_eval(
            [{"Technology"}, {"Automotive"}],
            [["Tech"], ["Sports"]],
            self.MAPPING,
        )
        assert result.correct == 1
        assert result.evaluated == 2
        assert result.accuracy == 0.5

    def test_generic_beats_excluded(self):
        result = beat_tier_eval(
            [{"Technology"}],
            [["Content Source Geo", "Tech"]],
            self.MAPPING,
        )
        assert result.correct == 1
        result2 = beat_tier_eval(
            [{"Technology"}],
            [["Content Source Geo"]],
            self.MAPPING,
        )
        assert result2.evaluated == 0
        assert result2.skipped_no_beats == 1

    def test_unmappable_articles_excluded_from_denominator(self):
        result = beat_tier_eval(
            [{"Sports"}, {"Sports"}, {"Sports"}],
            [["Sports"], ["UnknownBeat"], []],
            self.MAPPING,
        )
        assert result.evaluated == 1
        assert result.skipped_no_beats == 2
        assert result.accuracy == 1.0

    def test_ten_article_hand_count(self):
        predictions = [
            {"Sports"}, {"Technology"}, {"Politics"}, {"Sports"}, {"Law"},
            {"Automotive"}, {"Technology"}, {"Sports"}, {"Politics"}, {"Technology"},
        ]
        beats = [
            ["Sports"],            # correct
            ["Tech"],              # correct
            ["Sports"],            # wrong
            ["Politics"],          # wrong
            ["Politics"],          # correct (Law in mapping)
            ["Tech"],              # wrong
            ["Content Source"],    # skipped
            ["NoSuchBeat"],        # skipped
            ["Politics", "Tech"],  # correct
            [],                    # skipped
        ]
        result = beat_tier_eval(predictions, beats, self.MAPPING)
        assert result.evaluated == 7
        assert result.correct == 4
        assert result.accuracy == pytest.approx(4 / 7)

    def test_misaligned_inputs_rejected(self):
        with pytest.raises(ValueError):
            beat_tier_eval([{"A"}], [], self.MAPPING)

    def test_shipped_mapping_loads(self, tmp_path):
        path = tmp_path / "map.csv"
        path.write_bytes(shipped_path("beat_tier1_mapping.csv").read_bytes())
        mapping = load_beat_mapping(path)
        assert "Technology & Computing" in mapping["Tech"]
        assert len(mapping["Entertainment"]) == 4


class TestTierLabelSet:
    def test_from_lists_and_round_trip(self):
        data = {"tier1": ["A"], "tier2": [], "tier3": ["C", "B"], "tier4": []}
        labels = TierLabelSet.from_lists(data)
        assert labels.tier1 == frozenset({"A"})
        assert labels.as_dict() == {
            "tier1": ["A"], "tier2": [], "tier3": ["B", "C"], "tier4": [],
        }

    def test_all_labels_and_truthiness(self):
        assert not TierLabelSet()
        labels = TierLabelSet(tier4=frozenset({"X"}))
        assert labels.all_labels() == frozenset({"X"})
        assert labels
