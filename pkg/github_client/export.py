# github_client/export.py
from __future__ import annotations
import logging
from typing import Iterable, Optional

from common import config
from common.logger import CSVLogger
from corpus.document import Source
from corpus.projects import project_by_name
from github_client.client import RawComment, RepoRef

logger = logging.getLogger(__name__)


def export_unlabeled(comments: Iterable[RawComment], path: str,
                     repo: Optional[RepoRef] = None) -> int:
    """
    Corpus CSV with blank label columns, ready for annotation.
    Whitespace-only bodies are dropped.
    """
    rec = project_by_name(repo.slug) if repo else None
    project = rec.name if rec else (repo.name if repo else "")
    dropped = 0
    with CSVLogger(str(path), config.CSV_COLUMNS) as out:
        for c in comments:
            if not c.body.strip():
                dropped += 1
                continue
            row = {col: "" for col in config.CSV_COLUMNS}
            row.update(id=f"gh-{c.id}", source=Source.ISSUE_COMMENT.value, project=project, text=c.body)
            out.write(row)
        written = out.rows
    if dropped:
        logger.info("dropped %d empty comment bodies", dropped)
    logger.info("exported %d unlabeled comments to %s", written, path)
    return written
