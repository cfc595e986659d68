# features/ngrams.py
from typing import List, Sequence, Tuple


def _check_range(ngram_range: Tuple[int, int]) -> Tuple[int, int]:
    lo, hi = int(ngram_range[0]), int(ngram_range[1])
    if lo < 1 or hi < lo:
        raise ValueError(f"invalid ngram range ({lo},{hi})")
    return lo, hi


def char_ngrams(text: str, ngram_range: Tuple[int, int]) -> List[str]:
    """Contiguous substrings for each n in range; spaces count as characters. Multiplicity kept."""
    lo, hi = _check_range(ngram_range)
    out = []
    for n in range(lo, hi + 1):
        out.extend(text[i:i + n] for i in range(len(text) - n + 1))
    return out


def word_ngrams(tokens: Sequence[str], ngram_range: Tuple[int, int]) -> List[str]:
    lo, hi = _check_range(ngram_range)
    out = []
    for n in range(lo, hi + 1):
        out.extend(" ".join(tokens[i:i + n]) for i in range(len(tokens) - n + 1))
    return out
