"""TF-IDF vector space: vocabulary fitting, sparse document vectors, cosine
similarity, and a bit-exact text persistence format.

Weights follow the plain weight = term_count * ln(N / df) scheme with no
smoothing, so a term present in every document always weighs exactly 0 and is
dropped from vectors. Vectors are L2-normalized by default, which makes
cosine similarity a plain sparse dot product.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .errors import InputFileError

FORMAT_TAG = "pitchlist-tfidf v1"

NORMS = ("l2", "none")


@dataclass
class Vocabulary:
    """Dense term index with per-term document frequencies."""

    index: dict[str, int]
    terms: list[str]
    document_count: int
    doc_freq: list[int]

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.index


@dataclass(frozen=True)
class SparseVector:
    """Sorted (term index, weight) pairs; zero weights are never stored."""

    entries: tuple[tuple[int, float], ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def norm(self) -> float:
        return math.sqrt(sum(w * w for _, w in self.entries))


@dataclass
class TfIdfModel:
    vocabulary: Vocabulary
    idf: list[float]
    norm: str = "l2"


def fit(corpus: Sequence[Iterable[str]], norm: str = "l2") -> TfIdfModel:
    """Fit vocabulary, document frequencies, and idf over a token corpus.

    idf(t) = ln(document_count / doc_freq(t)); the corpus must contain at
    least one non-empty document.
    """
    if norm not in NORMS:
        raise ValueError(f"unknown norm {norm!r}")
    docs = [list(doc) for doc in corpus]
    if not docs:
        raise ValueError("cannot fit on an empty corpus")
    if not any(docs):
        raise ValueError("corpus has no non-empty document")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc))
    terms = sorted(df)
    index = {term: i for i, term in enumerate(terms)}
    doc_freq = [df[term] for term in terms]
    n = len(docs)
    idf = [math.log(n / f) for f in doc_freq]
    vocab = Vocabulary(index=index, terms=terms, document_count=n, doc_freq=doc_freq)
    return TfIdfModel(vocabulary=vocab, idf=idf, norm=norm)


def transform(model: TfIdfModel, doc: Iterable[str]) -> SparseVector:
    """Weight = count(term) * idf(term); OOV and zero-weight terms dropped."""
    counts = Counter(doc)
    index = model.vocabulary.index
    entries = []
    for term, count in counts.items():
        i = index.get(term)
        if i is None:
            continue
        weight = count * model.idf[i]
        if weight != 0.0:
            entries.append((i, weight))
    entries.sort()
    if model.norm == "l2" and entries:
        scale = math.sqrt(sum(w * w for _, w in entries))
        entries = [(i, w / scale) for i, w in entries]
    return SparseVector(tuple(entries))


def cosine_similarity(a: SparseVector, b: SparseVector) -> float:
    """dot(a, b) / (|a| |b|); 0.0 when either vector is empty."""
    if not a or not b:
        return 0.0
    dot = 0.0
    ia, ib = 0, 0
    ea, eb = a.entries, b.entries
    while ia < len(ea) and ib < len(eb):
        ta, wa = ea[ia]
        tb, wb = eb[ib]
        if ta == tb:
            dot += wa * wb
            ia += 1
            ib += 1
        elif ta < tb:
            ia += 1
        else:
            ib += 1
    denom = a.norm() * b.norm()
    if denom == 0.0:
        return 0.0
    return dot / denom


def top_terms(
    vector: SparseVector, n: int, vocab: Vocabulary
) -> list[tuple[str, float]]:
    """The n largest-weight entries, ties broken by ascending term index."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ranked = sorted(vector.entries, key=lambda e: (-e[1], e[0]))
    return [(vocab.terms[i], w) for i, w in ranked[:n]]


def stack(vectors: Sequence[SparseVector], dim: int) -> sparse.csr_matrix:
    """Pack sparse vectors into a CSR matrix for batch dot products."""
    data: list[float] = []
    indices: list[int] = []
    indptr = [0]
    for vec in vectors:
        for i, w in vec.entries:
            indices.append(i)
            data.append(w)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(vectors), dim),
    )


def save_model(model: TfIdfModel, path) -> None:
    """Write the model in the versioned text container (bit-exact weights)."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(model_to_text(model))


def model_to_text(model: TfIdfModel) -> str:
    vocab = model.vocabulary
    lines = [
        FORMAT_TAG,
        f"norm {model.norm}",
        f"documents {vocab.document_count}",
        f"terms {len(vocab)}",
    ]
    for i, term in enumerate(vocab.terms):
        if "\t" in term or "\n" in term:
            raise ValueError(
                f"term {term!r} contains a tab or newline and cannot be "
                "stored in the text container"
            )
        lines.append(f"{term}\t{vocab.doc_freq[i]}\t{model.idf[i].hex()}")
    return "\n".join(lines) + "\n"


def load_model(path) -> TfIdfModel:
    with open(path, encoding="utf-8") as f:
        return model_from_lines(f.read().splitlines())


def model_from_lines(lines: list[str]) -> TfIdfModel:
    if not lines or lines[0] != FORMAT_TAG:
        raise InputFileError(f"not a {FORMAT_TAG} container")
    norm = lines[1].split(" ", 1)[1]
    document_count = int(lines[2].split(" ", 1)[1])
    n_terms = int(lines[3].split(" ", 1)[1])
    terms: list[str] = []
    doc_freq: list[int] = []
    idf: list[float] = []
    for line in lines[4 : 4 + n_terms]:
        term, df, idf_hex = line.split("\t")
        terms.append(term)
        doc_freq.append(int(df))
        idf.append(float.fromhex(idf_hex))
    if len(terms) != n_terms:
        raise InputFileError("model container truncated")
    vocab = Vocabulary(
        index={t: i for i, t in enumerate(terms)},
        terms=terms,
        document_count=document_count,
        doc_freq=doc_freq,
    )
    return TfIdfModel(vocabulary=vocab, idf=idf, norm=norm)
