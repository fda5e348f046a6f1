"""Record linkage between journalist profiles and an email database.

Candidate emails are built as firstname+lastname@outlet-domain from each
journalist's modal outlet, comparisons run only inside first-name blocks,
and pairs at or above the similarity threshold are kept (best email per
journalist). The comparison counter is exposed so callers can verify the
blocking arithmetic.
"""

from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass, field
from statistics import mean

from .corpus import EmailRecord, JournalistProfile
from .errors import InputFileError
from .matching import levenshtein, ngrams

LINKAGE_THRESHOLD = 0.5

MATCH_LABELS = ("true", "false", "invalid", "unlabeled")

COMPARATORS = ("levenshtein", "ngram")

_KEY_KEEP = re.compile(r"[^0-9a-z]+")


@dataclass(frozen=True)
class EmailMatch:
    journalist: str
    email: str
    similarity: float
    label: str = "unlabeled"


@dataclass
class Block:
    key: str
    left: list[JournalistProfile] = field(default_factory=list)
    right: list[EmailRecord] = field(default_factory=list)

    @property
    def pair_count(self) -> int:
        return len(self.left) * len(self.right)


@dataclass
class LinkageResult:
    matches: list[EmailMatch]
    comparisons: int
    candidate_pairs: int
    skipped: list[tuple[str, str]]  # (journalist, reason)


@dataclass
class LabelSummary:
    counts: dict[str, int]
    mean_similarity: dict[str, float]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


class MissingDomainError(LookupError):
    """The journalist's modal outlet has no entry in the domain table."""


def normalize_first_name(name: str) -> str:
    """Lowercase first whitespace token with non-alphanumerics removed."""
    tokens = name.split()
    if not tokens:
        return ""
    return _KEY_KEEP.sub("", tokens[0].lower())


def modal_outlet(profile: JournalistProfile) -> str:
    """The outlet with the most credited articles; ties go alphabetically."""
    if not profile.outlets:
        raise ValueError(f"journalist {profile.full_name!r} has no outlets")
    return min(profile.outlets, key=lambda name: (-profile.outlets[name], name))


def candidate_string(profile: JournalistProfile, domain_table: dict[str, str]) -> str:
    """Lowercase firstnamelastname@domain for the journalist's modal outlet."""
    outlet = modal_outlet(profile)
    domain = domain_table.get(outlet)
    if domain is None:
        raise MissingDomainError(outlet)
    first = _KEY_KEEP.sub("", profile.first_name.lower())
    last = _KEY_KEEP.sub("", profile.last_name.lower())
    return f"{first}{last}@{domain.lower()}"


def block(
    journalists: list[JournalistProfile], emails: list[EmailRecord]
) -> list[Block]:
    """Group both sides by normalized first name; keys on one side only
    produce no block. Blocks are sorted by key."""
    left: dict[str, list[JournalistProfile]] = {}
    for j in journalists:
        key = normalize_first_name(j.first_name)
        if key:
            left.setdefault(key, []).append(j)
    right: dict[str, list[EmailRecord]] = {}
    for e in emails:
        key = normalize_first_name(e.first_name)
        if key:
            right.setdefault(key, []).append(e)
    blocks = []
    for key in sorted(left.keys() & right.keys()):
        blocks.append(Block(key=key, left=left[key], right=right[key]))
    return blocks


def levenshtein_similarity(a: str, b: str) -> float:
    """1 - distance / max(len); 1.0 for two equal strings."""
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


def ngram_cosine_similarity(a: str, b: str, n: int = 3) -> float:
    """Cosine over raw character n-gram counts of the padded strings."""
    ca = Counter(ngrams(a, n))
    cb = Counter(ngrams(b, n))
    dot = sum(ca[g] * cb[g] for g in ca.keys() & cb.keys())
    if dot == 0:
        return 0.0
    na = sum(v * v for v in ca.values()) ** 0.5
    nb = sum(v * v for v in cb.values()) ** 0.5
    return dot / (na * nb)


def link_emails(
    journalists: list[JournalistProfile],
    emails: list[EmailRecord],
    domain_table: dict[str, str],
    threshold: float = LINKAGE_THRESHOLD,
    comparator: str = "levenshtein",
) -> LinkageResult:
    """Blocked record linkage; emits the best email per journalist with
    similarity >= threshold, sorted by (journalist, email)."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    if comparator not in COMPARATORS:
        raise ValueError(f"unknown comparator {comparator!r}")
    compare = (
        levenshtein_similarity if comparator == "levenshtein" else ngram_cosine_similarity
    )

    candidates: dict[str, str] = {}
    skipped: list[tuple[str, str]] = []
    for j in journalists:
        try:
            candidates[j.full_name] = candidate_string(j, domain_table)
        except MissingDomainError as exc:
            skipped.append((j.full_name, f"no domain mapping for outlet {exc.args[0]!r}"))
        except ValueError as exc:
            skipped.append((j.full_name, str(exc)))

    linkable = [j for j in journalists if j.full_name in candidates]
    blocks = block(linkable, emails)
    candidate_pairs = sum(b.pair_count for b in blocks)

    comparisons = 0
    best: dict[str, tuple[float, str]] = {}
    for blk in blocks:
        for j in blk.left:
            candidate = candidates[j.full_name]
            for record in blk.right:
                comparisons += 1
                similarity = compare(candidate, record.address)
                if similarity < threshold:
                    continue
                current = best.get(j.full_name)
                key = (-similarity, record.address)
                if current is None or key < (-current[0], current[1]):
                    best[j.full_name] = (similarity, record.address)

    matches = [
        EmailMatch(journalist=name, email=addr, similarity=sim)
        for name, (sim, addr) in best.items()
    ]
    matches.sort(key=lambda m: (m.journalist, m.email))
    return LinkageResult(
        matches=matches,
        comparisons=comparisons,
        candidate_pairs=candidate_pairs,
        skipped=skipped,
    )


def label_matches(
    matches: list[EmailMatch], oracle: dict[str, str]
) -> tuple[list[EmailMatch], LabelSummary]:
    """Label each match against known journalist->email ground truth.

    true: oracle lists the same address; false: oracle lists a different
    one; invalid: journalist absent from the oracle.
    """
    labeled = []
    for m in matches:
        known = oracle.get(m.journalist)
        if known is None:
            label = "invalid"
        elif known.strip().lower() == m.email.strip().lower():
            label = "true"
        else:
            label = "false"
        labeled.append(EmailMatch(m.journalist, m.email, m.similarity, label))
    counts: dict[str, int] = {"true": 0, "false": 0, "invalid": 0}
    sims: dict[str, list[float]] = {"true": [], "false": [], "invalid": []}
    for m in labeled:
        counts[m.label] += 1
        sims[m.label].append(m.similarity)
    means = {k: (mean(v) if v else 0.0) for k, v in sims.items()}
    return labeled, LabelSummary(counts=counts, mean_similarity=means)


def load_oracle(path) -> dict[str, str]:
    """Oracle CSV: journalist_full_name,email."""
    oracle: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8", newline="") as f:
            for row in csv.DictReader(f):
                name = (row.get("journalist_full_name") or "").strip()
                email = (row.get("email") or "").strip()
                if name and email:
                    oracle[name] = email
    except OSError as exc:
        raise InputFileError(f"cannot read oracle file {path}: {exc}") from exc
    return oracle


def load_domain_table(path) -> dict[str, str]:
    """Domain table CSV: outlet,domain."""
    table: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8", newline="") as f:
            for row in csv.DictReader(f):
                outlet = (row.get("outlet") or "").strip()
                domain = (row.get("domain") or "").strip()
                if outlet and domain:
                    table[outlet] = domain
    except OSError as exc:
        raise InputFileError(f"cannot read domain table {path}: {exc}") from exc
    return table


def matches_csv(matches: list[EmailMatch]) -> str:
    lines = ["journalist,email,similarity,label"]
    for m in matches:
        journalist = f'"{m.journalist}"' if "," in m.journalist else m.journalist
        lines.append(f"{journalist},{m.email},{m.similarity:.6f},{m.label}")
    return "\n".join(lines) + "\n"
