"""Shared fixtures: small article corpora and temp-file writers."""

import csv
import json

import pytest

from pitchlist.corpus import Article


def make_article(
    aid,
    full_text,
    authors=("Jane Doe",),
    title="",
    description="",
    topic="tech",
    outlet="The Daily",
    url=None,
):
    return Article(
        id=str(aid),
        title=title,
        description=description,
        full_text=full_text,
        topic=topic,
        authors=tuple(authors),
        outlet=outlet,
        url=url,
    )


@pytest.fixture
def write_csv(tmp_path):
    def _write(name, header, rows):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            writer.writerows(rows)
        return path

    return _write


@pytest.fixture
def write_jsonl(tmp_path):
    def _write(name, records):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as f:
            for record in records:
                f.write(json.dumps(record) + "\n")
        return path

    return _write
