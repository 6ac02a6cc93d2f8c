"""Prototype selection and recursive-edit neighborhood construction.

Real counterfactuals from the corpus seed the process; each round tries
to integrate every explicand word into every current prototype, and the
edited texts become the next round's prototypes. All intermediate texts
accumulate into the neighborhood, so members trace a gradual transition
from the prototypes' class toward the explicand's.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blackbox import ClassifierHandle, Prediction
from .corpus import Corpus, SparseVector, TfidfModel, TokenSeq, cosine_distance, vectorize
from .editor import apply_edit, best_edit
from .errors import NoPrototypesError
from .ngram import NgramIndex


@dataclass(frozen=True)
class Prototype:
    tokens: TokenSeq
    distance: float
    probs: Prediction


@dataclass
class PrototypeSet:
    """Counterfactual seeds, ascending by distance to the explicand."""

    members: list[Prototype]

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class NeighborhoodMember:
    tokens: TokenSeq
    probs: Prediction
    distance: float
    round: int


@dataclass
class Neighborhood:
    """Deduplicated synthetic texts around the explicand, pseudo-labeled."""

    explicand: TokenSeq
    target_class: int
    members: list[NeighborhoodMember]

    def __len__(self) -> int:
        return len(self.members)


def select_prototypes(
    explicand: TokenSeq,
    corpus: Corpus,
    classifier: ClassifierHandle,
    tfidf: TfidfModel,
    k: int,
    doc_vectors: list[SparseVector] | None = None,
    confidence_cutoff: float | None = None,
) -> PrototypeSet:
    """Pick the k corpus counterfactuals closest to the explicand.

    A document is a counterfactual when its predicted class differs from
    the explicand's; with confidence_cutoff set, when its probability for
    the explicand's class falls below the cutoff (useful beyond binary
    tasks). doc_vectors may carry precomputed tf-idf vectors for the
    corpus documents, in corpus order.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    target = _argmax(classifier.classify_one(explicand))
    predictions = classifier.classify_batch(corpus.documents)
    if doc_vectors is None:
        doc_vectors = [vectorize(tfidf, doc) for doc in corpus.documents]
    explicand_vec = vectorize(tfidf, explicand)

    candidates = []
    for doc, probs, vec in zip(corpus.documents, predictions, doc_vectors):
        if confidence_cutoff is None:
            is_counterfactual = _argmax(probs) != target
        else:
            is_counterfactual = probs[target] < confidence_cutoff
        if is_counterfactual:
            candidates.append(Prototype(doc, cosine_distance(explicand_vec, vec), probs))
    if not candidates:
        raise NoPrototypesError(
            "corpus contains no counterfactual for the explicand's predicted class"
        )
    candidates.sort(key=lambda p: p.distance)
    return PrototypeSet(members=candidates[:k])


def build_neighborhood(
    explicand: TokenSeq,
    prototypes: PrototypeSet,
    index: NgramIndex,
    classifier: ClassifierHandle,
    tfidf: TfidfModel,
    population: int,
    max_rounds: int = 32,
) -> Neighborhood:
    """Grow the neighborhood by recursive probability-based editing.

    Round r takes every (explicand word, prototype) pair, skips pairs
    where the prototype already contains the word or no valid edit
    exists, and collects the edited texts. Texts never seen before become
    round r+1's prototypes. The loop stops when a round produces nothing
    new, the member count reaches `population`, or `max_rounds` is hit;
    the closest `population` members are then classified and kept.
    """
    if not prototypes.members:
        raise ValueError("prototype set must be non-empty")
    if population < len(prototypes.members):
        raise ValueError("population must be at least the prototype count")
    explicand_vec = vectorize(tfidf, explicand)
    words = list(dict.fromkeys(explicand))

    def distance_of(tokens: TokenSeq) -> float:
        return cosine_distance(explicand_vec, vectorize(tfidf, tokens))

    collected: dict[TokenSeq, int] = {}  # tokens -> generation round
    distances: dict[TokenSeq, float] = {}
    for proto in prototypes.members:
        if proto.tokens not in collected:
            collected[proto.tokens] = 0
            distances[proto.tokens] = proto.distance

    current = sorted(collected, key=distances.__getitem__)
    round_no = 0
    while current and len(collected) < population and round_no < max_rounds:
        round_no += 1
        produced: dict[TokenSeq, None] = {}
        for w in words:
            for proto in current:
                if w in proto:
                    continue
                op = best_edit(index, w, proto)
                if op is None:
                    continue
                produced[apply_edit(proto, w, op)] = None
        novel = [t for t in produced if t not in collected]
        for tokens in novel:
            collected[tokens] = round_no
            distances[tokens] = distance_of(tokens)
        current = sorted(novel, key=distances.__getitem__)

    kept = sorted(collected, key=distances.__getitem__)[:population]
    predictions = classifier.classify_batch(kept)
    target = _argmax(classifier.classify_one(explicand))
    members = [
        NeighborhoodMember(tokens=t, probs=p, distance=distances[t], round=collected[t])
        for t, p in zip(kept, predictions)
    ]
    return Neighborhood(explicand=explicand, target_class=target, members=members)


def _argmax(probs: Prediction) -> int:
    return max(range(len(probs)), key=probs.__getitem__)
