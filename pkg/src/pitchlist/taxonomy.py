"""Four-tier content taxonomy with two multilabel classifiers and the
evaluation suite.

Labels are opaque strings carried in per-tier sets. The One-vs-Rest
classifier trains one binary multinomial Naive Bayes model per label
(Laplace smoothing); the KNN classifier votes over the nearest training
documents in TF-IDF space. Metrics cover subset accuracy plus
precision/recall/F1 in macro, micro, and weighted averaging.
"""

from __future__ import annotations

import csv
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import vectorspace
from .errors import InputFileError, PitchlistError
from .vectorspace import SparseVector, TfIdfModel

TIERS = (1, 2, 3, 4)

NB_TAU = 0.5

KNN_K = 3

GENERIC_BEATS = frozenset({"Content Source Geo", "Content Language", "Content Source"})


class TaxonomyError(PitchlistError):
    """Structural problem in a taxonomy file (cycle, tier mismatch, bad ref)."""


@dataclass(frozen=True)
class TaxonomyNode:
    id: str
    name: str
    tier: int
    parent_id: str | None


class TaxonomyTree:
    """Validated 4-level category tree; roots are exactly the tier-1 nodes."""

    def __init__(self, nodes: Iterable[TaxonomyNode]):
        self.nodes: dict[str, TaxonomyNode] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise TaxonomyError(f"duplicate node id {node.id!r}")
            self.nodes[node.id] = node
        self._names = {n.name for n in self.nodes.values()}
        self._validate()

    def _validate(self) -> None:
        if not self.nodes:
            raise TaxonomyError("taxonomy is empty")
        for node in self.nodes.values():
            if node.tier not in TIERS:
                raise TaxonomyError(f"node {node.id!r}: tier {node.tier} out of range")
            if node.tier == 1:
                if node.parent_id is not None:
                    raise TaxonomyError(f"node {node.id!r}: tier-1 node has a parent")
                continue
            if node.parent_id is None:
                raise TaxonomyError(f"node {node.id!r}: tier {node.tier} node without parent")
            parent = self.nodes.get(node.parent_id)
            if parent is None:
                raise TaxonomyError(f"node {node.id!r}: unknown parent {node.parent_id!r}")
            if parent.tier != node.tier - 1:
                raise TaxonomyError(
                    f"node {node.id!r}: tier {node.tier} under tier {parent.tier} parent"
                )
        # parent tiers strictly decrease along any chain, so cycles are
        # impossible once the tier arithmetic holds; walk to be explicit.
        for node in self.nodes.values():
            seen = {node.id}
            current = node
            while current.parent_id is not None:
                if current.parent_id in seen:
                    raise TaxonomyError(f"cycle through node {node.id!r}")
                seen.add(current.parent_id)
                current = self.nodes[current.parent_id]

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, label: str) -> bool:
        return label in self.nodes or label in self._names

    def roots(self) -> list[TaxonomyNode]:
        return [n for n in self.nodes.values() if n.tier == 1]

    def children(self, node_id: str) -> list[TaxonomyNode]:
        return [n for n in self.nodes.values() if n.parent_id == node_id]

    def path(self, node_id: str) -> list[TaxonomyNode]:
        node = self.nodes[node_id]
        chain = [node]
        while node.parent_id is not None:
            node = self.nodes[node.parent_id]
            chain.append(node)
        return list(reversed(chain))

    def name_of(self, node_id: str) -> str:
        return self.nodes[node_id].name


def load_taxonomy(path) -> TaxonomyTree:
    """Taxonomy CSV: id,name,tier,parent_id (blank parent for tier-1 roots)."""
    nodes = []
    try:
        with open(path, encoding="utf-8", newline="") as f:
            for row in csv.DictReader(f):
                node_id = (row.get("id") or "").strip()
                if not node_id:
                    raise TaxonomyError("row without id")
                parent = (row.get("parent_id") or "").strip() or None
                try:
                    tier = int(row.get("tier") or 0)
                except ValueError as exc:
                    raise TaxonomyError(f"node {node_id!r}: bad tier") from exc
                nodes.append(
                    TaxonomyNode(
                        id=node_id,
                        name=(row.get("name") or "").strip(),
                        tier=tier,
                        parent_id=parent,
                    )
                )
    except OSError as exc:
        raise InputFileError(f"cannot read taxonomy {path}: {exc}") from exc
    return TaxonomyTree(nodes)


@dataclass(frozen=True)
class TierLabelSet:
    """Per-tier label sets; any slot may be empty."""

    tier1: frozenset[str] = frozenset()
    tier2: frozenset[str] = frozenset()
    tier3: frozenset[str] = frozenset()
    tier4: frozenset[str] = frozenset()

    @classmethod
    def from_lists(cls, data: Mapping[str, Iterable[str]]) -> "TierLabelSet":
        return cls(
            tier1=frozenset(data.get("tier1", ())),
            tier2=frozenset(data.get("tier2", ())),
            tier3=frozenset(data.get("tier3", ())),
            tier4=frozenset(data.get("tier4", ())),
        )

    def tier(self, level: int) -> frozenset[str]:
        return getattr(self, f"tier{level}")

    def all_labels(self) -> frozenset[str]:
        return self.tier1 | self.tier2 | self.tier3 | self.tier4

    def as_dict(self) -> dict[str, list[str]]:
        return {f"tier{t}": sorted(self.tier(t)) for t in TIERS}

    def __bool__(self) -> bool:
        return bool(self.all_labels())


def _label_tiers(labels: Sequence[TierLabelSet]) -> dict[str, int]:
    tiers: dict[str, int] = {}
    for label_set in labels:
        for t in TIERS:
            for label in label_set.tier(t):
                tiers.setdefault(label, t)
    return tiers


# ---------------------------------------------------------------------------
# One-vs-Rest multinomial Naive Bayes
# ---------------------------------------------------------------------------


@dataclass
class BinaryNaiveBayes:
    """Binary multinomial NB for one label: presence vs absence."""

    label: str
    tier: int
    prior_pos: float
    log_prob_pos: dict[str, float]   # term -> log P(term | label present)
    log_prob_neg: dict[str, float]
    default_log_pos: float           # smoothed log prob of an unseen-in-class term
    default_log_neg: float


@dataclass
class OneVsRestNB:
    models: dict[str, BinaryNaiveBayes]
    vocabulary: frozenset[str]
    alpha: float

    def labels_for_tier(self, tier: int) -> list[str]:
        return sorted(m.label for m in self.models.values() if m.tier == tier)


def train_nb(
    docs: Sequence[Iterable[str]],
    labels: Sequence[TierLabelSet],
    alpha: float = 1.0,
    tree: TaxonomyTree | None = None,
    label_universe: Iterable[str] | None = None,
) -> OneVsRestNB:
    """One binary multinomial NB per label with Laplace smoothing alpha.

    Labels default to those observed in the training data; an explicit
    label_universe may add labels, but any with zero positive documents are
    dropped with a warning.
    """
    if len(docs) != len(labels):
        raise ValueError("docs and labels must be aligned")
    if not docs:
        raise ValueError("cannot train on an empty corpus")
    tokenized = [list(d) for d in docs]
    tiers = _label_tiers(labels)
    if tree is not None:
        for label in tiers:
            if label not in tree:
                raise TaxonomyError(f"training label {label!r} not in the taxonomy")

    vocabulary = frozenset(t for doc in tokenized for t in doc)
    v_size = len(vocabulary)
    n_docs = len(tokenized)
    doc_counts = [Counter(doc) for doc in tokenized]
    total_counts: Counter[str] = Counter()
    total_tokens = 0
    for counts in doc_counts:
        total_counts.update(counts)
        total_tokens += sum(counts.values())

    wanted = dict(tiers)
    if label_universe is not None:
        for label in label_universe:
            if label not in wanted:
                warnings.warn(f"label {label!r} has no positive document; dropped")

    models: dict[str, BinaryNaiveBayes] = {}
    for label in sorted(wanted):
        tier = wanted[label]
        positive = [i for i, ls in enumerate(labels) if label in ls.tier(tier)]
        pos_counts: Counter[str] = Counter()
        pos_tokens = 0
        for i in positive:
            pos_counts.update(doc_counts[i])
            pos_tokens += sum(doc_counts[i].values())
        neg_tokens = total_tokens - pos_tokens

        denom_pos = pos_tokens + alpha * v_size
        denom_neg = neg_tokens + alpha * v_size
        log_prob_pos = {
            t: math.log((pos_counts[t] + alpha) / denom_pos) for t in vocabulary
        }
        log_prob_neg = {
            t: math.log((total_counts[t] - pos_counts[t] + alpha) / denom_neg)
            for t in vocabulary
        }
        models[label] = BinaryNaiveBayes(
            label=label,
            tier=tier,
            prior_pos=len(positive) / n_docs,
            log_prob_pos=log_prob_pos,
            log_prob_neg=log_prob_neg,
            default_log_pos=math.log(alpha / denom_pos),
            default_log_neg=math.log(alpha / denom_neg),
        )
    return OneVsRestNB(models=models, vocabulary=vocabulary, alpha=alpha)


def posterior(classifier: OneVsRestNB, doc: Iterable[str]) -> dict[str, float]:
    """P(label | doc) per label, computed in log space.

    Out-of-vocabulary tokens are ignored. An empty (or fully OOV) document
    yields each label's prior.
    """
    counts = Counter(t for t in doc if t in classifier.vocabulary)
    posts: dict[str, float] = {}
    for label, model in classifier.models.items():
        if model.prior_pos >= 1.0:
            posts[label] = 1.0
            continue
        if model.prior_pos <= 0.0:
            posts[label] = 0.0
            continue
        log_odds = math.log(model.prior_pos) - math.log(1.0 - model.prior_pos)
        for term, count in counts.items():
            lp = model.log_prob_pos.get(term, model.default_log_pos)
            ln = model.log_prob_neg.get(term, model.default_log_neg)
            log_odds += count * (lp - ln)
        if log_odds >= 0:
            posts[label] = 1.0 / (1.0 + math.exp(-log_odds))
        else:
            e = math.exp(log_odds)
            posts[label] = e / (1.0 + e)
    return posts


def predict_nb(
    classifier: OneVsRestNB, doc: Iterable[str], tau: float = NB_TAU
) -> TierLabelSet:
    """Labels with posterior >= tau; a tier where nothing clears tau falls
    back to that tier's single highest-posterior label (ties by label)."""
    posts = posterior(classifier, doc)
    slots: dict[int, set[str]] = {t: set() for t in TIERS}
    for label, p in posts.items():
        if p >= tau:
            slots[classifier.models[label].tier].add(label)
    for tier in TIERS:
        if slots[tier]:
            continue
        tier_labels = classifier.labels_for_tier(tier)
        if not tier_labels:
            continue
        best = min(tier_labels, key=lambda lb: (-posts[lb], lb))
        slots[tier].add(best)
    return TierLabelSet(
        tier1=frozenset(slots[1]),
        tier2=frozenset(slots[2]),
        tier3=frozenset(slots[3]),
        tier4=frozenset(slots[4]),
    )


# ---------------------------------------------------------------------------
# K-nearest-neighbors tier classifier
# ---------------------------------------------------------------------------


@dataclass
class KnnTierClassifier:
    model: TfIdfModel
    vectors: list[SparseVector]
    labels: list[TierLabelSet]
    matrix: object | None = field(repr=False, default=None)


def train_knn(
    docs: Sequence[Iterable[str]], labels: Sequence[TierLabelSet]
) -> KnnTierClassifier:
    """Vectorize the training docs in their own TF-IDF space."""
    if len(docs) != len(labels):
        raise ValueError("docs and labels must be aligned")
    tokenized = [list(d) for d in docs]
    model = vectorspace.fit(tokenized, norm="l2")
    vectors = [vectorspace.transform(model, d) for d in tokenized]
    return KnnTierClassifier(model=model, vectors=vectors, labels=list(labels))


def predict_knn(
    classifier: KnnTierClassifier, doc: Iterable[str], k: int = KNN_K
) -> TierLabelSet:
    """Majority vote per tier over the k nearest neighbors.

    A label is kept when it appears in a strict majority of the k
    neighbors; a tier with no majority label falls back to the nearest
    neighbor's labels for that tier. k is clamped (with a warning) when
    there are fewer training documents.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = len(classifier.vectors)
    if k > n:
        warnings.warn(f"k={k} clamped to {n} training documents")
        k = n
    query = vectorspace.transform(classifier.model, list(doc))
    if classifier.matrix is None:
        classifier.matrix = vectorspace.stack(
            classifier.vectors, len(classifier.model.vocabulary)
        )
    dense = np.zeros(len(classifier.model.vocabulary))
    for i, w in query.entries:
        dense[i] = w
    scores = classifier.matrix.dot(dense)
    order = sorted(range(n), key=lambda i: (-scores[i], i))
    neighbors = order[:k]
    need = k // 2 + 1

    slots = {}
    nearest = classifier.labels[neighbors[0]]
    for tier in TIERS:
        votes: Counter[str] = Counter()
        for i in neighbors:
            votes.update(classifier.labels[i].tier(tier))
        majority = {label for label, count in votes.items() if count >= need}
        slots[tier] = frozenset(majority) if majority else nearest.tier(tier)
    return TierLabelSet(
        tier1=slots[1], tier2=slots[2], tier3=slots[3], tier4=slots[4]
    )


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    micro_precision: float
    micro_recall: float
    micro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    zero_support_labels: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "micro_precision": self.micro_precision,
            "micro_recall": self.micro_recall,
            "micro_f1": self.micro_f1,
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f1": self.weighted_f1,
            "zero_support_labels": list(self.zero_support_labels),
        }


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def _f1(precision: float, recall: float) -> float:
    return _safe_div(2 * precision * recall, precision + recall)


def evaluate(
    predictions: Sequence[TierLabelSet], truth: Sequence[TierLabelSet]
) -> MetricsReport:
    """Subset accuracy plus per-label P/R/F1 aggregates.

    Per-label counts pool all four tiers. Labels that are predicted but
    never true (zero support) are excluded from macro and weighted
    averaging and listed in the report.
    """
    if len(predictions) != len(truth):
        raise ValueError("predictions and truth must be aligned")
    if not truth:
        raise ValueError("nothing to evaluate")

    exact = sum(1 for p, t in zip(predictions, truth) if p == t)
    accuracy = exact / len(truth)

    labels = set()
    for p in predictions:
        labels |= p.all_labels()
    for t in truth:
        labels |= t.all_labels()

    tp: Counter[str] = Counter()
    fp: Counter[str] = Counter()
    fn: Counter[str] = Counter()
    for p, t in zip(predictions, truth):
        pset, tset = p.all_labels(), t.all_labels()
        for label in pset & tset:
            tp[label] += 1
        for label in pset - tset:
            fp[label] += 1
        for label in tset - pset:
            fn[label] += 1

    support = {label: tp[label] + fn[label] for label in labels}
    scored = sorted(label for label in labels if support[label] > 0)
    zero_support = tuple(sorted(label for label in labels if support[label] == 0))

    per_label = {}
    for label in scored:
        precision = _safe_div(tp[label], tp[label] + fp[label])
        recall = _safe_div(tp[label], tp[label] + fn[label])
        per_label[label] = (precision, recall, _f1(precision, recall))

    macro_p = _safe_div(sum(v[0] for v in per_label.values()), len(scored))
    macro_r = _safe_div(sum(v[1] for v in per_label.values()), len(scored))
    macro_f = _safe_div(sum(v[2] for v in per_label.values()), len(scored))

    total_support = sum(support[label] for label in scored)
    weighted_p = _safe_div(
        sum(per_label[l][0] * support[l] for l in scored), total_support
    )
    weighted_r = _safe_div(
        sum(per_label[l][1] * support[l] for l in scored), total_support
    )
    weighted_f = _safe_div(
        sum(per_label[l][2] * support[l] for l in scored), total_support
    )

    tp_all = sum(tp.values())
    fp_all = sum(fp.values())
    fn_all = sum(fn.values())
    micro_p = _safe_div(tp_all, tp_all + fp_all)
    micro_r = _safe_div(tp_all, tp_all + fn_all)

    return MetricsReport(
        accuracy=accuracy,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f,
        micro_precision=micro_p,
        micro_recall=micro_r,
        micro_f1=_f1(micro_p, micro_r),
        weighted_precision=weighted_p,
        weighted_recall=weighted_r,
        weighted_f1=weighted_f,
        zero_support_labels=zero_support,
    )


# ---------------------------------------------------------------------------
# Beat-to-tier evaluation
# ---------------------------------------------------------------------------


@dataclass
class BeatEvalResult:
    accuracy: float
    evaluated: int
    correct: int
    skipped_no_beats: int


def beat_tier_eval(
    predicted_tier1: Sequence[Iterable[str]],
    author_beats: Sequence[Iterable[str]],
    mapping: Mapping[str, Iterable[str]],
    exclude: frozenset[str] = GENERIC_BEATS,
) -> BeatEvalResult:
    """At-least-one-match accuracy of predicted tier-1 labels vs beats.

    Beats in the exclusion list are ignored. An article whose beats map to
    no tier-1 label is excluded from the denominator and counted in the
    result.
    """
    if len(predicted_tier1) != len(author_beats):
        raise ValueError("predictions and beats must be aligned")
    evaluated = 0
    correct = 0
    skipped = 0
    for predicted, beats in zip(predicted_tier1, author_beats):
        candidates: set[str] = set()
        for beat in beats:
            if beat in exclude:
                continue
            candidates.update(mapping.get(beat, ()))
        if not candidates:
            skipped += 1
            continue
        evaluated += 1
        if candidates & set(predicted):
            correct += 1
    accuracy = _safe_div(correct, evaluated)
    return BeatEvalResult(
        accuracy=accuracy, evaluated=evaluated, correct=correct, skipped_no_beats=skipped
    )


def load_beat_mapping(path) -> dict[str, frozenset[str]]:
    """Beat mapping CSV: beat_name,tier1_label (multiple rows per beat)."""
    mapping: dict[str, set[str]] = {}
    try:
        with open(path, encoding="utf-8", newline="") as f:
            for row in csv.DictReader(f):
                beat = (row.get("beat_name") or "").strip()
                label = (row.get("tier1_label") or "").strip()
                if beat and label:
                    mapping.setdefault(beat, set()).add(label)
    except OSError as exc:
        raise InputFileError(f"cannot read beat mapping {path}: {exc}") from exc
    return {beat: frozenset(labels) for beat, labels in mapping.items()}
