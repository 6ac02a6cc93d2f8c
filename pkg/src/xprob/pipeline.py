"""End-to-end explanation sessions.

An Explainer binds a corpus, a classifier handle, and a RunConfig, and
precomputes everything reusable across explicands: the tf-idf model, the
subsequence index, and the corpus document vectors. Explanations are
deterministic for the editing method; the drop baseline is deterministic
given its seed.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

from .baseline import perturb_by_dropping
from .blackbox import ClassifierHandle
from .config import RunConfig
from .corpus import Corpus, TokenSeq, fit_tfidf, tokenize, vectorize
from .errors import XprobError
from .evaluation import MetricRecord, aopc, confidence_drop, fidelity, r_squared
from .explanation import (
    ExplanationReport,
    InstanceExplanation,
    build_report,
    select_instances,
)
from .neighborhood import (
    Neighborhood,
    PrototypeSet,
    build_neighborhood,
    select_prototypes,
)
from .ngram import build_index
from .surrogate import AttributionVector, SurrogateModel, fit_surrogate, split_attributions

log = logging.getLogger(__name__)


@dataclass
class ExplanationOutcome:
    """Report plus the intermediate artifacts the metrics need."""

    report: ExplanationReport
    neighborhood: Neighborhood
    surrogate: SurrogateModel
    attribution: AttributionVector  # untruncated
    instances: InstanceExplanation
    prototypes: PrototypeSet | None
    elapsed_seconds: float


class Explainer:
    def __init__(self, corpus: Corpus, classifier: ClassifierHandle, config: RunConfig):
        config.validate()
        self.corpus = corpus
        self.classifier = classifier
        self.config = config
        self.tfidf = fit_tfidf(corpus)
        self.index = build_index(corpus, config.n)
        self.doc_vectors = [vectorize(self.tfidf, doc) for doc in corpus.documents]

    def explain_text(self, text: str, method: str | None = None, seed: int | None = None):
        tokens = tokenize(text)
        if not tokens:
            raise XprobError(f"explicand {text!r} has no tokens")
        return self.explain_tokens(tokens, method=method, seed=seed)

    def explain_tokens(
        self, tokens: TokenSeq, method: str | None = None, seed: int | None = None
    ) -> ExplanationOutcome:
        method = method or self.config.method
        seed = self.config.seed if seed is None else seed
        cfg = self.config
        started = time.perf_counter()
        prototypes = None
        if method == "xprob":
            prototypes = select_prototypes(
                tokens,
                self.corpus,
                self.classifier,
                self.tfidf,
                cfg.prototypes,
                doc_vectors=self.doc_vectors,
            )
            neighborhood = build_neighborhood(
                tokens,
                prototypes,
                self.index,
                self.classifier,
                self.tfidf,
                cfg.population,
                max_rounds=cfg.max_rounds,
            )
        elif method == "drop":
            neighborhood = perturb_by_dropping(
                tokens, self.tfidf, self.classifier, cfg.population, seed
            )
        else:
            raise XprobError(f"unknown method {method!r}")
        surrogate = fit_surrogate(neighborhood, cfg.sigma, cfg.ridge)
        attribution = split_attributions(surrogate, tokens)
        instances = select_instances(neighborhood, tokens, self.tfidf, cfg.balance, cfg.instances)
        elapsed = time.perf_counter() - started

        probs = self.classifier.classify_one(tokens)
        report = build_report(
            tokens,
            probs,
            attribution,
            instances,
            meta=self._meta(),
            extrinsic_threshold=cfg.threshold,
        )
        return ExplanationOutcome(
            report=report,
            neighborhood=neighborhood,
            surrogate=surrogate,
            attribution=attribution,
            instances=instances,
            prototypes=prototypes,
            elapsed_seconds=elapsed,
        )

    def evaluate_tokens(
        self, tokens: TokenSeq, method: str | None = None, seed: int | None = None
    ) -> tuple[MetricRecord, ExplanationOutcome]:
        """Explain, then score the explanation with the full metric suite."""
        outcome = self.explain_tokens(tokens, method=method, seed=seed)
        record = MetricRecord(
            r2=r_squared(outcome.surrogate, outcome.neighborhood),
            fidelity=fidelity(outcome.surrogate, outcome.neighborhood),
            confidence_drop=confidence_drop(
                outcome.attribution, tokens, self.classifier, self.index, self.config.threshold
            ),
            aopc=aopc(
                outcome.attribution, tokens, self.classifier, self.index, self.config.threshold
            ),
            wall_time_seconds=outcome.elapsed_seconds,
        )
        return record, outcome

    def attribution_or_none(
        self, tokens: TokenSeq, method: str | None = None, seed: int | None = None
    ) -> AttributionVector | None:
        """Per-text failure tolerant wrapper used by batch studies."""
        try:
            return self.explain_tokens(tokens, method=method, seed=seed).attribution
        except XprobError as exc:
            log.warning("explanation failed for %r: %s", " ".join(tokens), exc)
            return None

    def _meta(self) -> dict:
        cfg = self.config
        return {
            "n": cfg.n,
            "k": cfg.prototypes,
            "population": cfg.population,
            "sigma": cfg.sigma,
            "lambda": cfg.balance,
            "ridge": cfg.ridge,
            "corpus_sha256": self.corpus.sha256,
            "classifier": self.classifier.describe(),
        }
