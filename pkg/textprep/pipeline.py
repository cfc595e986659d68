# textprep/pipeline.py
from __future__ import annotations
import logging
import re
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Dict, List, Sequence

from joblib import Parallel, delayed
from nltk.stem.snowball import SnowballStemmer

from common import config
from common.errors import ConfigError
from corpus.dataset import Dataset
from textprep.resources import CONTRACTIONS, STOPWORDS

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PreprocessConfig:
    lowercase: bool = True
    strip_numbers: bool = True
    strip_punctuation: bool = True
    collapse_repeats: bool = True
    expand_contractions: bool = True
    stem: bool = True
    remove_stopwords: bool = True
    stopword_list_version: str = config.STOPWORD_LIST_VERSION
    contraction_map_version: str = config.CONTRACTION_MAP_VERSION

    def __post_init__(self):
        # only the embedded tables exist; a different version cannot be honoured
        if self.stopword_list_version != config.STOPWORD_LIST_VERSION:
            raise ConfigError(f"unknown stopword list version '{self.stopword_list_version}'")
        if self.contraction_map_version != config.CONTRACTION_MAP_VERSION:
            raise ConfigError(f"unknown contraction map version '{self.contraction_map_version}'")

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)

    @staticmethod
    def from_dict(d: Dict[str, object]) -> "PreprocessConfig":
        return PreprocessConfig(**d)


@dataclass(frozen=True)
class TokenizedDocument:
    doc_id: str
    tokens: tuple
    normalized_text: str


# ------------------------------
# Steps
# ------------------------------

_APOSTROPHES = str.maketrans({"’": "'", "‘": "'"})

# longest key first so "can't've" wins over "can't"
_CONTRACTION_RE = re.compile(
    r"(?<![\w'])("
    + "|".join(re.escape(k) for k in sorted(CONTRACTIONS, key=lambda k: (-len(k), k)))
    + r")(?![\w'])"
)

_DIGITS_RE = re.compile(r"\d+")
_PUNCT_RE = re.compile(r"[^\w\s]|_")
_REPEAT_RE = re.compile(r"([^\W\d_])\1{2,}")
_SPACE_RE = re.compile(r"\s+")


def normalize_case(text: str) -> str:
    return text.lower()


def expand_contractions(text: str) -> str:
    text = text.translate(_APOSTROPHES)
    return _CONTRACTION_RE.sub(lambda m: CONTRACTIONS[m.group(1)], text)


def strip_noise(text: str, numbers: bool = True, punctuation: bool = True, repeats: bool = True) -> str:
    """
    Digits deleted, punctuation and special characters become a space,
    3+ identical letters collapse to 2, whitespace collapsed and trimmed.
    """
    if numbers:
        text = _DIGITS_RE.sub("", text)
    if punctuation:
        text = _PUNCT_RE.sub(" ", text)
    if repeats:
        text = _REPEAT_RE.sub(r"\1\1", text)
    return _SPACE_RE.sub(" ", text).strip()


def tokenize(text: str) -> List[str]:
    return text.split()


def remove_stopwords(tokens: Sequence[str]) -> List[str]:
    return [t for t in tokens if t not in STOPWORDS]


@lru_cache(maxsize=1)
def _stemmer() -> SnowballStemmer:
    return SnowballStemmer("english")


def stem(token: str) -> str:
    """
    Porter2 (Snowball English) stem, repeated until the token stops changing
    so that stem(stem(t)) == stem(t).
    """
    stemmer = _stemmer()
    for _ in range(config.STEM_MAX_PASSES):
        out = stemmer.stem(token)
        if out == token:
            break
        token = out
    return token


# ------------------------------
# Pipeline
# ------------------------------

def preprocess(text: str, cfg: PreprocessConfig = PreprocessConfig(), doc_id: str = "") -> TokenizedDocument:
    if cfg.lowercase:
        text = normalize_case(text)
    if cfg.expand_contractions:
        text = expand_contractions(text)
    if cfg.strip_numbers or cfg.strip_punctuation or cfg.collapse_repeats:
        text = strip_noise(text, cfg.strip_numbers, cfg.strip_punctuation, cfg.collapse_repeats)
    tokens = tokenize(text)
    if cfg.remove_stopwords:
        tokens = remove_stopwords(tokens)
    if cfg.stem:
        tokens = [stem(t) for t in tokens]
        if cfg.remove_stopwords:
            # "wills" -> "will"
            tokens = remove_stopwords(tokens)
    tokens = [t for t in tokens if t]
    return TokenizedDocument(doc_id=doc_id, tokens=tuple(tokens), normalized_text=" ".join(tokens))


def preprocess_dataset(dataset: Dataset, cfg: PreprocessConfig = PreprocessConfig(),
                       n_jobs: int = 1) -> List[TokenizedDocument]:
    """One TokenizedDocument per document, in dataset order."""
    if n_jobs == 1:
        out = [preprocess(d.text, cfg, d.id) for d in dataset.documents]
    else:
        out = Parallel(n_jobs=n_jobs)(delayed(preprocess)(d.text, cfg, d.id) for d in dataset.documents)
    empty = sum(1 for t in out if not t.tokens)
    if empty:
        logger.debug("%d of %d documents have no tokens after preprocessing", empty, len(out))
    return list(out)
