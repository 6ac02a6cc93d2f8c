"""Search for the best site to integrate a token into a prototype.

An edit is a pair (i, j), 1-based over the prototype padded with n
sentinel tokens on each side: the tokens up to position i are kept, the
target token w goes in the middle, and the tokens from position j onward
are kept. j = i + 1 is a pure insertion; larger j replaces the span in
between. Each candidate is scored by the product of the two contextual
probabilities of w, damped by e^(j - i) so that sweeping edits lose
against local ones. An edit is only valid when the undamped product
exceeds epsilon squared, i.e. when at least one of the two contexts has
actually been observed next to w in the corpus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import TokenSeq
from .ngram import PAD, NgramIndex, p_pre, p_suc, pad_sequence


@dataclass(frozen=True)
class EditOperation:
    """A scored edit site.

    i and j are 1-based positions over the prototype padded with n
    sentinels per side; n is carried along because the indices are
    meaningless without it.
    """

    i: int
    j: int
    score: float
    raw_product: float
    n: int

    @property
    def span(self) -> int:
        return self.j - self.i


# e^-(span) matrices keyed by size, upper triangle only (offset a <= b maps
# to span b - a + 1).
_penalty_cache: dict[int, np.ndarray] = {}


def _penalty_matrix(size: int) -> np.ndarray:
    mat = _penalty_cache.get(size)
    if mat is None:
        offs = np.arange(size)
        span = offs[None, :] - offs[:, None] + 1
        mat = np.where(span >= 1, np.exp(-span.astype(float)), 0.0)
        _penalty_cache[size] = mat
    return mat


def best_edit(
    index: NgramIndex,
    w: str,
    prototype: TokenSeq,
    insert_only: bool = False,
) -> EditOperation | None:
    """Find the highest-scoring valid edit integrating w, or None.

    Ties on the score prefer the smaller span j - i, then the smaller i,
    so the search has a total order and results are reproducible. With
    insert_only the search is restricted to j = i + 1 (no token of the
    prototype is removed).
    """
    if not prototype:
        raise ValueError("prototype must be non-empty")
    if w == PAD:
        raise ValueError("cannot integrate the padding sentinel")
    n = index.n
    l = len(prototype)
    padded = pad_sequence(prototype, n)
    eps2 = index.epsilon * index.epsilon

    # Offset a = i - n in 0..l, offset b = j - n - 1 in 0..l; a <= b keeps
    # i < j and both contexts inside the padding.
    pre = np.array([p_pre(index, w, padded[a : a + n]) for a in range(l + 1)])
    suc = np.array([p_suc(index, w, padded[b + 1 : b + 1 + n]) for b in range(l + 1)])

    if insert_only:
        raw = pre * suc
        scores = np.where(raw > eps2, raw * np.exp(-1.0), -np.inf)
        if not np.any(scores > -np.inf):
            return None
        best = scores.max()
        a = int(np.flatnonzero(scores == best)[0])
        return EditOperation(
            i=a + n, j=a + n + 1, score=float(best), raw_product=float(raw[a]), n=n
        )

    raw = pre[:, None] * suc[None, :]
    scores = raw * _penalty_matrix(l + 1)
    valid = (raw > eps2) & (np.arange(l + 1)[:, None] <= np.arange(l + 1)[None, :])
    scores = np.where(valid, scores, -np.inf)
    if not np.any(valid):
        return None
    best = scores.max()
    ties = np.argwhere(scores == best)
    a, b = min(ties, key=lambda ab: (ab[1] - ab[0], ab[0]))
    return EditOperation(
        i=int(a) + n,
        j=int(b) + n + 1,
        score=float(best),
        raw_product=float(raw[a, b]),
        n=n,
    )


def apply_edit(prototype: TokenSeq, w: str, op: EditOperation) -> TokenSeq:
    """Materialize the edited text, with all padding stripped."""
    a = op.i - op.n
    b = op.j - op.n - 1
    l = len(prototype)
    if not (0 <= a <= b <= l):
        raise ValueError(f"edit ({op.i}, {op.j}, n={op.n}) is out of range for length {l}")
    return prototype[:a] + (w,) + prototype[b:]
