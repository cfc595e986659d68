# tests/test_github_client.py
import csv

import pytest
import requests

from common import config
from common.errors import (
    AuthError, ConfigError, DatasetError, RateLimitError, RemoteError, RepoNotFoundError,
)
from corpus.dataset import load_texts
from github_client.client import (
    GitHubClient,
    RawComment,
    RepoRef,
    merge_comments,
    read_raw_comments,
    token_from_env,
    write_raw_comments,
)
from github_client.export import export_unlabeled
from github_client.sampling import sample_random


class FakeResponse:
    def __init__(self, status_code=200, payload=None, headers=None):
        self.status_code = status_code
        self._payload = payload
        self.headers = headers or {}

    def json(self):
        return self._payload


class FakeSession:
    """Replays queued responses and records every call."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.headers = {}
        self.calls = []

    def get(self, url, params=None, timeout=None):
        self.calls.append((url, dict(params or {})))
        r = self.responses.pop(0)
        if isinstance(r, Exception):
            raise r
        return r


def _comments(start, n):
    return [{"id": i, "issue_url": f"https://api.github.com/repos/o/r/issues/{i}", "body": f"comment {i}",
             "created_at": "2021-01-01T00:00:00Z", "user": {"login": f"u{i}"}} for i in range(start, start + n)]


def _client(responses, **kw):
    session = FakeSession(responses)
    slept = []
    client = GitHubClient(session=session, sleep=slept.append, clock=lambda: 1000.0, **kw)
    return client, session, slept


# ------------------------------
# RepoRef
# ------------------------------

def test_repo_ref_parse():
    assert RepoRef.parse("termux/termux-app").slug == "termux/termux-app"
    assert RepoRef.parse("Signal") == RepoRef("WhisperSystems", "Signal-Android")
    for bad in ("", "justaname", "/name", "owner/", "a/b/c"):
        with pytest.raises(ConfigError):
            RepoRef.parse(bad)


# ------------------------------
# pagination
# ------------------------------

def test_pages_until_short_page():
    client, session, _ = _client([
        FakeResponse(payload=_comments(0, 100)),
        FakeResponse(payload=_comments(100, 100)),
        FakeResponse(payload=_comments(200, 7)),
    ])
    out = client.fetch_issue_comments(RepoRef("o", "r"), max_pages=10)
    assert len(out) == 207
    assert [c[1]["page"] for c in session.calls] == [1, 2, 3]
    assert session.calls[0][0] == "https://api.github.com/repos/o/r/issues/comments"
    assert session.calls[0][1]["per_page"] == 100
    assert out[0] == RawComment(0, "https://api.github.com/repos/o/r/issues/0", "comment 0",
                                "2021-01-01T00:00:00Z", "u0")


def test_max_pages_and_duplicates():
    client, session, _ = _client([
        FakeResponse(payload=_comments(0, 100)),
        FakeResponse(payload=_comments(50, 100)),
    ])
    out = client.fetch_issue_comments(RepoRef("o", "r"), max_pages=2)
    assert len(session.calls) == 2
    assert len(out) == 150
    assert len({c.id for c in out}) == 150
    with pytest.raises(ConfigError):
        client.fetch_issue_comments(RepoRef("o", "r"), max_pages=0)


def test_token_sets_headers(monkeypatch):
    client, session, _ = _client([], token="abc")
    assert session.headers["Authorization"] == "Bearer abc"
    assert session.headers["Accept"] == config.GITHUB_ACCEPT
    monkeypatch.setenv(config.GITHUB_TOKEN_ENV, "  tok ")
    assert token_from_env() == "tok"
    monkeypatch.delenv(config.GITHUB_TOKEN_ENV)
    assert token_from_env() is None


# ------------------------------
# errors and rate limits
# ------------------------------

def test_rate_limit_sleeps_until_reset():
    client, _, slept = _client([
        FakeResponse(403, headers={"x-ratelimit-remaining": "0", "x-ratelimit-reset": "1030"}),
        FakeResponse(payload=_comments(0, 3)),
    ])
    out = client.fetch_issue_comments(RepoRef("o", "r"), max_pages=1)
    assert len(out) == 3
    assert slept == [31.0]


def test_retry_after_header():
    client, _, slept = _client([FakeResponse(429, headers={"retry-after": "5"}), FakeResponse(payload=[])])
    assert client.get("/x") == []
    assert slept == [5.0]


def test_unreadable_retry_after_falls_back_to_backoff():
    dated = FakeResponse(429, headers={"retry-after": "Wed, 21 Oct 2015 07:28:00 GMT"})
    bad_reset = FakeResponse(403, headers={"x-ratelimit-remaining": "0", "x-ratelimit-reset": "soon"})
    client, _, slept = _client([dated, dated, bad_reset, FakeResponse(payload=[])])
    assert client.get("/x") == []
    assert slept == [2.0, 4.0, 8.0]


def test_rate_limit_gives_up():
    limited = FakeResponse(403, headers={"x-ratelimit-remaining": "0", "x-ratelimit-reset": "900"})
    client, _, slept = _client([limited] * 3, max_retries=2)
    with pytest.raises(RateLimitError):
        client.get("/x")
    assert slept == [1.0, 1.0]


@pytest.mark.parametrize("resp,exc", [
    (FakeResponse(404), RepoNotFoundError),
    (FakeResponse(401), AuthError),
    (FakeResponse(403), RemoteError),
    (FakeResponse(500), RemoteError),
    (requests.ConnectionError("down"), RemoteError),
])
def test_http_failures(resp, exc):
    client, _, slept = _client([resp])
    with pytest.raises(exc):
        client.fetch_repo_stats(RepoRef("o", "missing"))
    assert slept == []


def test_repo_stats():
    client, _, _ = _client([FakeResponse(payload={"stargazers_count": 20700, "open_issues_count": 12,
                                                   "forks_count": 4900})])
    stats = client.fetch_repo_stats(RepoRef("o", "r"))
    assert (stats.stars, stats.open_issues, stats.forks) == (20700, 12, 4900)


def test_unexpected_payload():
    client, _, _ = _client([FakeResponse(payload={"message": "nope"})])
    with pytest.raises(RemoteError, match="unexpected payload"):
        client.fetch_issue_comments(RepoRef("o", "r"), max_pages=1)


# ------------------------------
# raw storage, sampling, export
# ------------------------------

def test_raw_comments_persist_and_merge(tmp_path):
    a = [RawComment.from_api(o) for o in _comments(0, 3)]
    b = [RawComment.from_api(o) for o in _comments(2, 3)]
    merged = merge_comments(a, b)
    assert [c.id for c in merged] == [0, 1, 2, 3, 4]
    path = tmp_path / "raw.jsonl"
    assert write_raw_comments(merged, str(path)) == 5
    assert read_raw_comments(str(path)) == merged


def test_bad_raw_comment_line(tmp_path):
    path = tmp_path / "raw.jsonl"
    path.write_text('{"id": 1, "issue_url": "", "body": "x", "created_at": "", "author": ""}\n{"id": 2}\n')
    with pytest.raises(DatasetError) as ei:
        read_raw_comments(str(path))
    assert ei.value.line == 2


def test_sample_random():
    items = list(range(50))
    s = sample_random(items, 10, seed=3)
    assert len(s) == 10 and s == sorted(s) and len(set(s)) == 10
    assert sample_random(items, 10, seed=3) == s
    assert sample_random(items, 10, seed=4) != s
    assert sample_random(items, 80, seed=3) == items
    assert sample_random(items, 0, seed=3) == []
    with pytest.raises(ConfigError):
        sample_random(items, -1, seed=3)


def test_export_unlabeled(tmp_path):
    comments = [
        RawComment(1, "", "line one\nline two, with comma", "", "a"),
        RawComment(2, "", "   ", "", "b"),
        RawComment(3, "", "thanks!", "", "c"),
    ]
    path = tmp_path / "unlabeled.csv"
    assert export_unlabeled(comments, str(path), RepoRef.parse("signal")) == 2
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert [r["id"] for r in rows] == ["gh-1", "gh-3"]
    assert rows[0]["text"] == "line one\nline two, with comma"
    assert rows[0]["project"] == "Signal" and rows[0]["source"] == "issue_comment"
    assert all(rows[0][c] == "" for c in config.LABEL_COLUMNS)
    assert load_texts(str(path)) == [("gh-1", "line one\nline two, with comma"), ("gh-3", "thanks!")]


def test_export_unknown_repo_uses_repo_name(tmp_path):
    path = tmp_path / "u.csv"
    export_unlabeled([RawComment(9, "", "hello", "", "")], str(path), RepoRef("someone", "cool-app"))
    with open(path, newline="", encoding="utf-8") as f:
        assert next(csv.DictReader(f))["project"] == "cool-app"
