# github_client/client.py
from __future__ import annotations
import json
import logging
import os
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional

import requests

from common import config
from common.errors import (
    AuthError, ConfigError, DatasetError, RateLimitError, RemoteError, RepoNotFoundError,
)
from common.utils import atomic_write
from corpus.projects import project_by_name

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RepoRef:
    owner: str
    name: str

    def __post_init__(self):
        for part, value in (("owner", self.owner), ("name", self.name)):
            if not value or not value.strip() or "/" in value:
                raise ConfigError(f"repo {part} must be non-empty without slashes, got '{value}'")

    @staticmethod
    def parse(raw: str) -> "RepoRef":
        """'owner/name', or a registry project name ('signal')."""
        raw = (raw or "").strip()
        rec = project_by_name(raw)
        if rec is not None:
            raw = rec.repo
        owner, sep, name = raw.partition("/")
        if not sep:
            raise ConfigError(f"expected owner/name or a known project, got '{raw}'")
        return RepoRef(owner, name)

    @property
    def slug(self) -> str:
        return f"{self.owner}/{self.name}"


@dataclass(frozen=True)
class RawComment:
    id: int
    issue_url: str
    body: str
    created_at: str
    author: str

    @staticmethod
    def from_api(obj: Dict[str, Any]) -> "RawComment":
        user = obj.get("user") or {}
        return RawComment(
            id=int(obj["id"]),
            issue_url=str(obj.get("issue_url") or ""),
            body=str(obj.get("body") or ""),
            created_at=str(obj.get("created_at") or ""),
            author=str(user.get("login") or ""),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "issue_url": self.issue_url,
            "body": self.body,
            "created_at": self.created_at,
            "author": self.author,
        }


@dataclass(frozen=True)
class RepoStats:
    stars: int
    open_issues: int
    forks: int


def token_from_env() -> Optional[str]:
    tok = os.environ.get(config.GITHUB_TOKEN_ENV, "").strip()
    return tok or None


class GitHubClient:
    """
    Thin REST client. `session` and `sleep` are injectable; anonymous access
    works with the lower rate limit.
    """

    def __init__(self, token: Optional[str] = None,
                 session: Optional[requests.Session] = None,
                 sleep: Callable[[float], None] = time.sleep,
                 clock: Callable[[], float] = time.time,
                 max_retries: int = config.GITHUB_MAX_RETRIES,
                 api: str = config.GITHUB_API):
        self.session = session or requests.Session()
        self.session.headers.update({"Accept": config.GITHUB_ACCEPT})
        if token:
            self.session.headers.update({"Authorization": f"Bearer {token}"})
        self.sleep = sleep
        self.clock = clock
        self.max_retries = max_retries
        self.api = api.rstrip("/")

    def _backoff(self, attempt: int) -> float:
        return config.GITHUB_BACKOFF_BASE_SEC * 2 ** (attempt - 1)

    def _wait_seconds(self, resp, attempt: int = 1) -> Optional[float]:
        """Seconds to sleep before retry number `attempt`, or None when not rate limited."""
        if resp.status_code not in (403, 429):
            return None
        remaining = resp.headers.get("x-ratelimit-remaining")
        reset = resp.headers.get("x-ratelimit-reset")
        retry_after = resp.headers.get("retry-after")
        try:
            if retry_after:
                return max(0.0, float(retry_after))
            if remaining == "0" and reset:
                return max(0.0, float(reset) - self.clock()) + config.GITHUB_RESET_BUFFER_SEC
        except ValueError:
            # e.g. an HTTP-date retry-after
            logger.debug("unreadable rate limit headers %r/%r", retry_after, reset)
            return self._backoff(attempt)
        return None

    def get(self, path: str, params: Optional[Dict[str, Any]] = None, repo: str = "") -> Any:
        url = path if path.startswith("http") else f"{self.api}{path}"
        attempts = 0
        while True:
            try:
                resp = self.session.get(url, params=params, timeout=config.GITHUB_TIMEOUT_SEC)
            except requests.RequestException as e:
                raise RemoteError(f"GET {url} failed: {e}") from e

            if resp.status_code == 404:
                raise RepoNotFoundError(f"repository not found: {repo or url}")
            if resp.status_code == 401:
                raise AuthError("GitHub rejected the token (401)")

            wait = self._wait_seconds(resp, attempts + 1)
            if wait is not None:
                attempts += 1
                if attempts > self.max_retries:
                    raise RateLimitError(f"rate limit still exhausted after {self.max_retries} retries")
                logger.warning("rate limited, sleeping %.0fs (retry %d/%d)", wait, attempts, self.max_retries)
                self.sleep(wait)
                continue

            if resp.status_code >= 400:
                raise RemoteError(f"GET {url} -> HTTP {resp.status_code}")
            return resp.json()

    # ----------------------------
    # ENDPOINTS
    # ----------------------------

    def fetch_issue_comments(self, repo: RepoRef, max_pages: int) -> List[RawComment]:
        """
        Paginated /issues/comments, per_page=100. Stops at max_pages or on a
        short page. Comments repeated across pages are kept once.
        """
        if max_pages < 1:
            raise ConfigError(f"max_pages must be >= 1, got {max_pages}")
        out: List[RawComment] = []
        seen = set()
        for page in range(1, max_pages + 1):
            items = self.get(
                f"/repos/{repo.owner}/{repo.name}/issues/comments",
                params={"per_page": config.GITHUB_PER_PAGE, "page": page},
                repo=repo.slug,
            )
            if not isinstance(items, list):
                raise RemoteError(f"unexpected payload for {repo.slug} page {page}")
            for obj in items:
                c = RawComment.from_api(obj)
                if c.id not in seen:
                    seen.add(c.id)
                    out.append(c)
            logger.debug("[%s] page %d: %d comments", repo.slug, page, len(items))
            if len(items) < config.GITHUB_PER_PAGE:
                break
        logger.info("[%s] fetched %d comments", repo.slug, len(out))
        return out

    def fetch_repo_stats(self, repo: RepoRef) -> RepoStats:
        obj = self.get(f"/repos/{repo.owner}/{repo.name}", repo=repo.slug)
        return RepoStats(
            stars=int(obj.get("stargazers_count") or 0),
            open_issues=int(obj.get("open_issues_count") or 0),
            forks=int(obj.get("forks_count") or 0),
        )


def fetch_issue_comments(repo: RepoRef, max_pages: int, token: Optional[str] = None,
                         session: Optional[requests.Session] = None,
                         sleep: Callable[[float], None] = time.sleep) -> List[RawComment]:
    return GitHubClient(token=token, session=session, sleep=sleep).fetch_issue_comments(repo, max_pages)


# ------------------------------
# Raw JSONL persistence
# ------------------------------

def merge_comments(existing: Iterable[RawComment], new: Iterable[RawComment]) -> List[RawComment]:
    """Union by comment id; first occurrence wins, order kept."""
    out, seen = [], set()
    for c in list(existing) + list(new):
        if c.id not in seen:
            seen.add(c.id)
            out.append(c)
    return out


def write_raw_comments(comments: Iterable[RawComment], path: str) -> int:
    n = 0
    with atomic_write(path) as f:
        for c in comments:
            f.write(json.dumps(c.to_dict(), ensure_ascii=False) + "\n")
            n += 1
    return n


def read_raw_comments(path: str) -> List[RawComment]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                out.append(RawComment(**json.loads(line)))
            except (ValueError, TypeError) as e:
                raise DatasetError(f"bad raw comment: {e}", line=lineno, path=str(path)) from None
    return out
