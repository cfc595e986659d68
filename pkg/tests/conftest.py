# tests/conftest.py
import csv
import json

import numpy as np
import pytest

from common import config
from corpus.dataset import Dataset
from corpus.document import Document, LabelVector, Source

WORDS = {
    "app_usage": ["crash", "battery", "freez", "button", "screen", "slow"],
    "inclusiveness": ["language", "blind", "font", "region", "translat", "contrast"],
    "user_reaction": ["love", "hate", "angry", "happy", "enjoy", "annoy"],
    "neutral": ["merge", "commit", "branch", "refactor", "gradl", "build", "pipelin"],
}


def make_doc(doc_id, bits, text="some text", source=Source.ISSUE_COMMENT, project="Signal", subs=None):
    return Document(id=doc_id, source=source, project=project, text=text,
                    labels=LabelVector(*bits), subcategories=subs)


def synthetic_documents(n, seed=0, source=None):
    """Keyword texts whose labels are recoverable from the words used."""
    g = np.random.Generator(np.random.PCG64(seed))
    docs = []
    for i in range(n):
        hc = g.random(3) < np.array([0.4, 0.2, 0.3])
        bits = [int(b) for b in hc] + [0 if hc.any() else 1]
        words = []
        for j, name in enumerate(config.LABEL_COLUMNS[:3]):
            if hc[j]:
                words += list(g.choice(WORDS[name], size=2, replace=False))
        words += list(g.choice(WORDS["neutral"], size=3, replace=False))
        g.shuffle(words)
        src = source or (Source.APP_REVIEW if i % 2 == 0 else Source.ISSUE_COMMENT)
        prefix = "r" if src is Source.APP_REVIEW else "c"
        docs.append(make_doc(f"{prefix}{seed}-{i}", bits, " ".join(words), source=src,
                             project="Signal" if i % 3 else "Termux"))
    return docs


@pytest.fixture
def synthetic():
    def _make(n=60, seed=0, source=None, name="synthetic"):
        return Dataset(documents=tuple(synthetic_documents(n, seed, source)), name=name)
    return _make


def write_rows_csv(path, rows, columns=None):
    columns = columns or config.CSV_COLUMNS
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.DictWriter(f, fieldnames=columns)
        w.writeheader()
        for r in rows:
            w.writerow(r)
    return str(path)


def write_rows_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r) + "\n")
    return str(path)


def row(doc_id, bits=(1, 0, 0, 0), text="the app crashes", source="issue_comment", project="Signal", subs=""):
    r = {"id": doc_id, "source": source, "project": project, "text": text, "subcategories": subs}
    r.update(dict(zip(config.LABEL_COLUMNS, bits)))
    return r
