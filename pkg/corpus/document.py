# corpus/document.py
from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Optional, Sequence, Tuple

from common import config


class Source(str, Enum):
    """Where a document came from; values are the on-disk spellings."""
    APP_REVIEW = "app_review"
    ISSUE_COMMENT = "issue_comment"


class Category(str, Enum):
    """High-level classes, in label-vector column order."""
    APP_USAGE = "app_usage"
    INCLUSIVENESS = "inclusiveness"
    USER_REACTION = "user_reaction"
    NON_HUMAN_CENTRIC = "non_human_centric"

    @property
    def index(self) -> int:
        return config.LABEL_COLUMNS.index(self.value)


HUMAN_CENTRIC = (Category.APP_USAGE, Category.INCLUSIVENESS, Category.USER_REACTION)


class Subcategory(str, Enum):
    """Taxonomy leaves."""
    RESOURCE_USAGE = "ResourceUsage"
    BUGINESS = "Buginess"
    CHANGE_UPDATE = "ChangeUpdate"
    UI_UX = "UiUx"
    PRIVACY_SECURITY = "PrivacySecurity"
    USAGE_INSTRUCTION = "UsageInstruction"
    ACCESS_ISSUES = "AccessIssues"
    APP_USAGE_OTHER = "AppUsageOther"
    COMPATIBILITY = "Compatibility"
    LOCATION = "Location"
    LANGUAGE = "Language"
    ACCESSIBILITY = "Accessibility"
    INCLUSIVENESS_OTHER = "InclusivenessOther"
    FULFILLING_INTERESTS = "FulfillingInterests"
    EMOTIONAL_ASPECTS = "EmotionalAspects"
    PREFERENCE = "Preference"
    USER_REACTION_OTHER = "UserReactionOther"

    @property
    def parent(self) -> Category:
        return _PARENT[self]


_PARENT = {
    **{s: Category.APP_USAGE for s in (
        Subcategory.RESOURCE_USAGE, Subcategory.BUGINESS, Subcategory.CHANGE_UPDATE,
        Subcategory.UI_UX, Subcategory.PRIVACY_SECURITY, Subcategory.USAGE_INSTRUCTION,
        Subcategory.ACCESS_ISSUES, Subcategory.APP_USAGE_OTHER)},
    **{s: Category.INCLUSIVENESS for s in (
        Subcategory.COMPATIBILITY, Subcategory.LOCATION, Subcategory.LANGUAGE,
        Subcategory.ACCESSIBILITY, Subcategory.INCLUSIVENESS_OTHER)},
    **{s: Category.USER_REACTION for s in (
        Subcategory.FULFILLING_INTERESTS, Subcategory.EMOTIONAL_ASPECTS,
        Subcategory.PREFERENCE, Subcategory.USER_REACTION_OTHER)},
}


@dataclass(frozen=True)
class LabelVector:
    app_usage: int = 0
    inclusiveness: int = 0
    user_reaction: int = 0
    non_human_centric: int = 0

    @staticmethod
    def from_bits(bits: Sequence[int]) -> "LabelVector":
        if len(bits) != config.N_LABELS:
            raise ValueError(f"expected {config.N_LABELS} label bits, got {len(bits)}")
        return LabelVector(*(int(b) for b in bits))

    def bits(self) -> Tuple[int, int, int, int]:
        return (self.app_usage, self.inclusiveness, self.user_reaction, self.non_human_centric)

    def has(self, category: Category) -> bool:
        return bool(self.bits()[category.index])

    @property
    def is_human_centric(self) -> bool:
        return bool(self.app_usage or self.inclusiveness or self.user_reaction)

    @property
    def is_consistent(self) -> bool:
        """Gold invariant: non_human_centric is set exactly when the other three are clear."""
        return self.non_human_centric == (0 if self.is_human_centric else 1)


@dataclass(frozen=True)
class Document:
    id: str
    source: Source
    project: str
    text: str
    labels: LabelVector
    subcategories: Optional[FrozenSet[Subcategory]] = field(default=None)


def parse_subcategories(raw: str) -> Optional[FrozenSet[Subcategory]]:
    """Semicolon-separated leaf names; blank means 'not annotated'."""
    raw = (raw or "").strip()
    if not raw:
        return None
    out = set()
    for tok in raw.split(config.SUBCATEGORY_SEP):
        tok = tok.strip()
        if tok:
            out.add(Subcategory(tok))
    return frozenset(out)


def format_subcategories(subs: Optional[FrozenSet[Subcategory]]) -> str:
    if not subs:
        return ""
    return config.SUBCATEGORY_SEP.join(sorted(s.value for s in subs))
