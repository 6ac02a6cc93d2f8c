"""Document-frequency index over short token subsequences.

The index counts, for every contiguous subsequence of length 1..n+1, how
many padded corpus documents contain it at least once (set semantics per
document). Those counts back the two conditional estimators used by the
editor: the probability of a token given its preceding context and given
its succeeding context. Ratios of document counts are not a normalized
language model and may exceed what token-level probabilities would allow;
that is intentional.

Zero counts are floored at epsilon = 1/(corpus size + 1) so that products
of the two conditionals never collapse to zero.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .corpus import Corpus, TokenSeq

# Sentinel concatenated n times to both ends of a document. Corpus tokens
# are lowercase, so the sentinel can never collide with real content.
PAD = "⟨PAD⟩"

_CACHE_MAGIC = b"XPNG1"


@dataclass
class NgramIndex:
    n: int
    subseq_df: dict[TokenSeq, int]
    corpus_size: int

    @property
    def epsilon(self) -> float:
        return 1.0 / (self.corpus_size + 1)

    def df(self, subseq: TokenSeq) -> int:
        return self.subseq_df.get(subseq, 0)


def pad_sequence(tokens: TokenSeq, n: int) -> TokenSeq:
    return (PAD,) * n + tuple(tokens) + (PAD,) * n


def build_index(corpus: Corpus, n: int) -> NgramIndex:
    """Index all padded-document subsequences of length 1..n+1.

    Each document contributes at most 1 to the count of any subsequence,
    no matter how often the subsequence repeats inside it.
    """
    if n < 1:
        raise ValueError(f"context length must be >= 1, got {n}")
    if not corpus.documents:
        raise ValueError("cannot index an empty corpus")
    counts: dict[TokenSeq, int] = {}
    for doc in corpus.documents:
        padded = pad_sequence(doc, n)
        seen: set[TokenSeq] = set()
        for length in range(1, n + 2):
            for start in range(len(padded) - length + 1):
                seen.add(padded[start : start + length])
        for sub in seen:
            counts[sub] = counts.get(sub, 0) + 1
    return NgramIndex(n=n, subseq_df=counts, corpus_size=len(corpus.documents))


def p_pre(index: NgramIndex, w: str, context: TokenSeq) -> float:
    """Probability of w following `context`, as a document-count ratio.

    Returns df(context + w) / df(context); epsilon when either count is 0.
    `context` must have length n.
    """
    if len(context) != index.n:
        raise ValueError(f"context must have length {index.n}, got {len(context)}")
    num = index.df(tuple(context) + (w,))
    den = index.df(tuple(context))
    if num == 0 or den == 0:
        return index.epsilon
    return num / den


def p_suc(index: NgramIndex, w: str, context: TokenSeq) -> float:
    """Probability of w preceding `context`: df(w + context) / df(context)."""
    if len(context) != index.n:
        raise ValueError(f"context must have length {index.n}, got {len(context)}")
    num = index.df((w,) + tuple(context))
    den = index.df(tuple(context))
    if num == 0 or den == 0:
        return index.epsilon
    return num / den


def save_index(index: NgramIndex, path: str) -> None:
    """Serialize to the versioned binary cache format.

    Layout: magic "XPNG1", uint32 n, uint64 corpus_size, uint64 entry
    count, then per entry a uint16 token count, each token as uint16
    byte length + UTF-8 bytes, and a uint64 document count.
    """
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<IQ", index.n, index.corpus_size))
        fh.write(struct.pack("<Q", len(index.subseq_df)))
        for subseq in sorted(index.subseq_df):
            fh.write(struct.pack("<H", len(subseq)))
            for token in subseq:
                raw = token.encode("utf-8")
                fh.write(struct.pack("<H", len(raw)))
                fh.write(raw)
            fh.write(struct.pack("<Q", index.subseq_df[subseq]))


def load_index(path: str) -> NgramIndex:
    with open(path, "rb") as fh:
        magic = fh.read(len(_CACHE_MAGIC))
        if magic != _CACHE_MAGIC:
            raise ValueError(f"{path!r} is not an index cache (bad magic {magic!r})")
        n, corpus_size = struct.unpack("<IQ", fh.read(12))
        (entries,) = struct.unpack("<Q", fh.read(8))
        counts: dict[TokenSeq, int] = {}
        for _ in range(entries):
            (token_count,) = struct.unpack("<H", fh.read(2))
            tokens = []
            for _ in range(token_count):
                (nbytes,) = struct.unpack("<H", fh.read(2))
                tokens.append(fh.read(nbytes).decode("utf-8"))
            (count,) = struct.unpack("<Q", fh.read(8))
            counts[tuple(tokens)] = count
    return NgramIndex(n=n, subseq_df=counts, corpus_size=corpus_size)
