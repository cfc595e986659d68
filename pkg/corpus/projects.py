# corpus/projects.py
from __future__ import annotations
from dataclasses import dataclass
from typing import Optional

from common import config


@dataclass(frozen=True)
class ProjectRecord:
    name: str
    repo: str                 # owner/name on GitHub
    play_id: str
    issues: int
    contributors: int
    stars: int
    forks: int
    downloads_millions: int   # lower bound of the Play Store bucket


# The 12 studied Android apps.
PROJECTS = (
    ProjectRecord("Signal", "WhisperSystems/Signal-Android", "org.thoughtcrime.securesms", 8871, 230, 20700, 4900, 50),
    ProjectRecord("Bitcoin-wallet", "bitcoin-wallet/bitcoin-wallet", "de.schildbach.wallet", 522, 29, 2450, 1600, 5),
    ProjectRecord("Brave", "brave/browser-android", "com.brave.browser", 819, 11, 1028, 186, 10),
    ProjectRecord("Duckduckgo", "duckduckgo/android", "com.duckduckgo.mobile.android", 354, 52, 1948, 564, 10),
    ProjectRecord("Termux", "termux/termux-app", "com.termux", 1743, 54, 7900, 1200, 10),
    ProjectRecord("Fbreader", "geometer/FBReaderJ", "org.geometerplus.zlibrary.ui.android", 320, 38, 1719, 805, 10),
    ProjectRecord("K-9", "k9mail/k-9", "com.fsck.k9", 3118, 226, 5800, 2200, 5),
    ProjectRecord("Pixel-dungeon", "watabou/pixel-dungeon", "com.watabou.pixeldungeon", 66, 1, 2788, 1000, 5),
    ProjectRecord("Firefox", "mozilla-mobile/fenix", "org.mozilla.firefox", 14637, 231, 5417, 1000, 100),
    ProjectRecord("WordPress", "wordpress-mobile/WordPress-Android", "org.wordpress.android", 6468, 149, 2478, 1200, 10),
    ProjectRecord("Cgeo", "cgeo/cgeo", "cgeo.geocaching", 6726, 117, 1108, 521, 5),
    ProjectRecord("Osmand", "osmandapp/Osmand", "net.osmand", 7568, 746, 22674, 817, 5),
)


def project_by_name(name: str) -> Optional[ProjectRecord]:
    """Case-insensitive lookup by display name, GitHub repo or Play id."""
    key = (name or "").strip().lower()
    for p in PROJECTS:
        if key in (p.name.lower(), p.repo.lower(), p.play_id.lower()):
            return p
    return None


@dataclass(frozen=True)
class SelectionCriteria:
    min_issue_comments: int = config.MIN_ISSUE_COMMENTS
    min_stars: int = config.MIN_STARS
    min_downloads_millions: int = config.MIN_DOWNLOADS_MILLIONS
    require_android: bool = True
    require_play_store: bool = True


@dataclass(frozen=True)
class ProjectCandidate:
    """What is known about an app at ingestion time; None = unknown."""
    name: str
    platform: str = "android"
    issue_comments: Optional[int] = None
    stars: Optional[int] = None
    on_play_store: Optional[bool] = None
    downloads_millions: Optional[float] = None


def check_selection(c: ProjectCandidate, criteria: SelectionCriteria = SelectionCriteria()) -> list[str]:
    """
    Names of the criteria the candidate fails. Unknown values are not failures;
    the thresholds are strict (> 100 comments, > 1,000 stars).
    Download counts are Play Store buckets ("5M+"), so the bucket itself passes.
    """
    failed = []
    if criteria.require_android and c.platform.lower() != "android":
        failed.append("android")
    if c.issue_comments is not None and c.issue_comments <= criteria.min_issue_comments:
        failed.append("issue_comments")
    if c.stars is not None and c.stars <= criteria.min_stars:
        failed.append("stars")
    if criteria.require_play_store and c.on_play_store is False:
        failed.append("play_store")
    if c.downloads_millions is not None and c.downloads_millions < criteria.min_downloads_millions:
        failed.append("downloads")
    return failed
