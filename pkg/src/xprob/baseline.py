"""Word-dropping neighborhood baseline.

Perturbs the explicand by deleting random word subsets (each position
kept with probability 0.5) and feeds the result through the exact same
surrogate and evaluation path as the editing pipeline. Every member is
an order-preserving subsequence of the explicand, so this explainer can
never surface extrinsic words.
"""

from __future__ import annotations

import random

from .blackbox import ClassifierHandle
from .corpus import TfidfModel, TokenSeq, cosine_distance, vectorize
from .errors import PerturbationError
from .neighborhood import Neighborhood, NeighborhoodMember, _argmax


def perturb_by_dropping(
    explicand: TokenSeq,
    tfidf: TfidfModel,
    classifier: ClassifierHandle,
    count: int,
    seed: int,
) -> Neighborhood:
    """Sample up to `count` unique variants (the explicand included).

    Masks are drawn uniformly over the non-empty, non-identity subsets;
    sampling stops once `count` unique texts are collected or every mask
    has been seen. Fixed seed, fixed output.
    """
    length = len(explicand)
    if length < 2:
        raise PerturbationError(
            f"explicand of length {length} cannot be perturbed by dropping"
        )
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")

    rng = random.Random(seed)
    full = (1 << length) - 1
    texts: dict[TokenSeq, int] = {tuple(explicand): 0}  # tokens -> round
    seen_masks: set[int] = set()
    while len(texts) < count and len(seen_masks) < full - 1:
        mask = rng.getrandbits(length)
        if mask == 0 or mask == full:
            continue
        seen_masks.add(mask)
        kept = tuple(tok for pos, tok in enumerate(explicand) if mask & (1 << pos))
        texts.setdefault(kept, 1)

    members_tokens = list(texts)
    predictions = classifier.classify_batch(members_tokens)
    explicand_vec = vectorize(tfidf, explicand)
    members = [
        NeighborhoodMember(
            tokens=t,
            probs=p,
            distance=cosine_distance(explicand_vec, vectorize(tfidf, t)),
            round=texts[t],
        )
        for t, p in zip(members_tokens, predictions)
    ]
    target = _argmax(classifier.classify_one(tuple(explicand)))
    return Neighborhood(explicand=tuple(explicand), target_class=target, members=members)
