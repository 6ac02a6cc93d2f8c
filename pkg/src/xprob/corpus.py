"""Corpus ingestion, tokenization, tf-idf vectors, and cosine distance.

Every stage of the pipeline shares one token universe: lowercase,
whitespace-split, punctuation-stripped words. Text proximity is measured
as cosine distance between L2-normalized tf-idf vectors fitted on the
prototype corpus; no external embedding model is involved.
"""

from __future__ import annotations

import hashlib
import math
import random
import unicodedata
from dataclasses import dataclass

from .errors import CorpusError

# A text is an ordered tuple of lowercase tokens (hashable, so sequences can
# be deduplicated and used as cache keys).
TokenSeq = tuple[str, ...]

# Column index -> tf-idf weight; zero entries are never stored.
SparseVector = dict[int, float]

_APOSTROPHES = ("'", "’")


def _strippable(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P") and ch not in _APOSTROPHES


def tokenize(text: str) -> TokenSeq:
    """Lowercase, split on whitespace, and strip edge punctuation.

    Apostrophes are never stripped ("don't" survives intact) and in-word
    hyphens are untouched; leading/trailing hyphens count as punctuation.
    Pieces that are empty after stripping are dropped.
    """
    tokens = []
    for piece in text.lower().split():
        start, end = 0, len(piece)
        while start < end and _strippable(piece[start]):
            start += 1
        while end > start and _strippable(piece[end - 1]):
            end -= 1
        if end > start:
            tokens.append(piece[start:end])
    return tuple(tokens)


@dataclass
class Corpus:
    """Prototype corpus: one document per line of the source file.

    Duplicate lines are kept as distinct documents so document frequencies
    reflect the empirical sample.
    """

    documents: list[TokenSeq]
    source_path: str = ""
    sha256: str = ""

    def __len__(self) -> int:
        return len(self.documents)


def load_corpus(path: str) -> Corpus:
    """Read a UTF-8 text file, one document per line; blank lines skipped."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path!r}: {exc}") from exc
    digest = hashlib.sha256(raw).hexdigest()
    documents = []
    for line in raw.decode("utf-8").splitlines():
        tokens = tokenize(line)
        if tokens:
            documents.append(tokens)
    if not documents:
        raise CorpusError(f"corpus file {path!r} contains no non-blank lines")
    return Corpus(documents=documents, source_path=str(path), sha256=digest)


def downsample_corpus(corpus: Corpus, size: int, seed: int) -> Corpus:
    """Keep a seeded random subset of `size` documents.

    Implemented as a shuffle-then-prefix so smaller samples are nested
    inside larger ones drawn with the same seed.
    """
    if size >= len(corpus.documents):
        return corpus
    order = list(range(len(corpus.documents)))
    random.Random(seed).shuffle(order)
    docs = [corpus.documents[i] for i in order[:size]]
    digest = hashlib.sha256(
        "\n".join(" ".join(d) for d in docs).encode("utf-8")
    ).hexdigest()
    return Corpus(
        documents=docs,
        source_path=f"{corpus.source_path}#sample{size}",
        sha256=digest,
    )


def load_labeled(path: str) -> list[tuple[str, str]]:
    """Read a two-column TSV of label<TAB>text pairs."""
    pairs = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                label, sep, text = line.partition("\t")
                if not sep:
                    raise CorpusError(f"{path}:{lineno}: expected label<TAB>text")
                pairs.append((label.strip(), text))
    except OSError as exc:
        raise CorpusError(f"cannot read labeled file {path!r}: {exc}") from exc
    if not pairs:
        raise CorpusError(f"labeled file {path!r} contains no rows")
    return pairs


@dataclass
class TfidfModel:
    """Vocabulary, smoothed idf weights, and the fitted document count."""

    vocabulary: dict[str, int]
    idf: list[float]
    doc_count: int


def fit_tfidf(corpus: Corpus) -> TfidfModel:
    """Fit idf weights over the corpus.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1, the smoothed variant, so that
    weights stay finite and strictly positive even for ubiquitous tokens.
    """
    if not corpus.documents:
        raise CorpusError("cannot fit tf-idf on an empty corpus")
    df: dict[str, int] = {}
    for doc in corpus.documents:
        for token in set(doc):
            df[token] = df.get(token, 0) + 1
    vocabulary = {token: col for col, token in enumerate(sorted(df))}
    n = len(corpus.documents)
    idf = [0.0] * len(vocabulary)
    for token, col in vocabulary.items():
        idf[col] = math.log((1 + n) / (1 + df[token])) + 1.0
    return TfidfModel(vocabulary=vocabulary, idf=idf, doc_count=n)


def vectorize(model: TfidfModel, tokens: TokenSeq) -> SparseVector:
    """tf * idf over in-vocabulary tokens, L2-normalized.

    Out-of-vocabulary tokens are ignored; a text with no known token maps
    to the zero vector.
    """
    counts: dict[int, int] = {}
    for token in tokens:
        col = model.vocabulary.get(token)
        if col is not None:
            counts[col] = counts.get(col, 0) + 1
    vec = {col: cnt * model.idf[col] for col, cnt in counts.items()}
    norm = math.sqrt(sum(w * w for w in vec.values()))
    if norm == 0.0:
        return {}
    return {col: w / norm for col, w in vec.items()}


def cosine_distance(a: SparseVector, b: SparseVector) -> float:
    """1 - dot(a, b) for normalized vectors, clamped to [0, 1].

    A zero vector is maximally far (distance 1) from everything,
    including another zero vector.
    """
    if not a or not b:
        return 1.0
    if len(b) < len(a):
        a, b = b, a
    dot = sum(w * b.get(col, 0.0) for col, w in a.items())
    return min(1.0, max(0.0, 1.0 - dot))
