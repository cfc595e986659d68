# corpus/stats.py
from __future__ import annotations
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from common.utils import format_pct
from corpus.dataset import Dataset
from corpus.document import Category, Document, HUMAN_CENTRIC, Subcategory


@dataclass
class GroupStats:
    """Counts for one slice of the corpus (overall, a source, or a project)."""
    name: str
    n: int = 0
    human_centric: int = 0
    categories: Counter = field(default_factory=Counter)
    subcategories: Counter = field(default_factory=Counter)

    def add(self, d: Document) -> None:
        self.n += 1
        if d.labels.is_human_centric:
            self.human_centric += 1
        for c in Category:
            if d.labels.has(c):
                self.categories[c] += 1
        for s in d.subcategories or ():
            self.subcategories[s] += 1

    def pct(self, count: int) -> float:
        return count / self.n if self.n else 0.0

    def category_pct(self, c: Category) -> float:
        return self.pct(self.categories[c])

    def headline(self) -> str:
        return f"human-centric: {self.human_centric}/{self.n} ({format_pct(self.human_centric, self.n)}%)"

    def as_row(self) -> Dict[str, object]:
        row: Dict[str, object] = {"group": self.name, "n": self.n, "human_centric": self.human_centric}
        for c in Category:
            row[c.value] = self.categories[c]
        for s in Subcategory:
            row[s.value] = self.subcategories[s]
        return row


@dataclass
class StatsReport:
    overall: GroupStats
    by_source: Dict[str, GroupStats]
    by_project: Dict[str, GroupStats]

    def extremes(self) -> Tuple[Optional[GroupStats], Optional[GroupStats]]:
        """(most, fewest) human-centric projects; ties go to the name first in sort order."""
        if not self.by_project:
            return None, None
        groups = sorted(self.by_project.values(), key=lambda g: g.name)
        most = max(groups, key=lambda g: g.human_centric)
        fewest = min(groups, key=lambda g: g.human_centric)
        return most, fewest

    def rows(self) -> List[Dict[str, object]]:
        out = [self.overall.as_row()]
        out += [g.as_row() for g in self.by_source.values()]
        out += [g.as_row() for g in self.by_project.values()]
        return out

    def render(self) -> List[str]:
        lines = [f"[{self.overall.name}] n={self.overall.n} {self.overall.headline()}"]
        for c in HUMAN_CENTRIC:
            cnt = self.overall.categories[c]
            lines.append(f"  {c.value}: {cnt}/{self.overall.n} ({format_pct(cnt, self.overall.n)}%)")
        if any(self.overall.subcategories.values()):
            for s in Subcategory:
                cnt = self.overall.subcategories[s]
                if cnt:
                    lines.append(f"    {s.parent.value}/{s.value}: {cnt}")
        for g in self.by_source.values():
            lines.append(f"[source={g.name}] n={g.n} {g.headline()}")
        for g in self.by_project.values():
            parts = " ".join(f"{c.value}={g.categories[c]}" for c in HUMAN_CENTRIC)
            lines.append(f"[project={g.name}] n={g.n} {g.headline()} {parts}")
        most, fewest = self.extremes()
        if most is not None and len(self.by_project) > 1:
            lines.append(f"most human-centric: {most.name} ({most.human_centric}/{most.n})")
            lines.append(f"fewest human-centric: {fewest.name} ({fewest.human_centric}/{fewest.n})")
        return lines


def _grouped(docs: Iterable[Document], key) -> Dict[str, GroupStats]:
    groups: Dict[str, GroupStats] = {}
    for d in docs:
        k = key(d)
        groups.setdefault(k, GroupStats(name=k)).add(d)
    return dict(sorted(groups.items()))


def corpus_stats(dataset: Dataset) -> StatsReport:
    overall = GroupStats(name=dataset.name or "overall")
    for d in dataset.documents:
        overall.add(d)
    return StatsReport(
        overall=overall,
        by_source=_grouped(dataset.documents, lambda d: d.source.value),
        by_project=_grouped(dataset.documents, lambda d: d.project or "(none)"),
    )
