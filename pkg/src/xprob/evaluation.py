"""Quantitative metrics and the template-based stability study.

Correctness is measured by the surrogate's fidelity and R^2 on its own
neighborhood. Completeness and compactness use explanation-guided
manipulation: supporting words (attribution above the threshold) are
deleted from the explicand and opposing extrinsic words are inserted at
their most plausible sites, then the black box's confidence drop is
recorded, either once for the fully manipulated text (confidence drop)
or cumulatively step by step (AOPC).

The stability study renders adjective/noun pairs into five fixed
templates and checks that a word's attribution barely moves across these
near-identical contexts.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .blackbox import ClassifierHandle
from .corpus import TokenSeq, tokenize
from .editor import apply_edit, best_edit
from .neighborhood import Neighborhood, _argmax
from .ngram import NgramIndex
from .surrogate import AttributionVector, SurrogateModel

log = logging.getLogger(__name__)


@dataclass
class MetricRecord:
    r2: float
    fidelity: float
    confidence_drop: float
    aopc: float
    wall_time_seconds: float


def fidelity(model: SurrogateModel, neighborhood: Neighborhood) -> float:
    """Label agreement between surrogate and black box over the members.

    The surrogate predicts the target class when its output is >= 0.5;
    the black box predicts it when argmax hits the target class.
    """
    if not neighborhood.members:
        raise ValueError("cannot compute fidelity on an empty neighborhood")
    target = neighborhood.target_class
    agree = 0
    for member in neighborhood.members:
        surrogate_says = model.predict(member.tokens) >= 0.5
        blackbox_says = _argmax(member.probs) == target
        agree += surrogate_says == blackbox_says
    return agree / len(neighborhood.members)


def r_squared(model: SurrogateModel, neighborhood: Neighborhood) -> float:
    """Coefficient of determination against the target-class probabilities.

    Returns NaN when the targets have zero variance (R^2 undefined).
    """
    members = neighborhood.members
    if len(members) < 2:
        raise ValueError("need at least 2 members for R^2")
    target = neighborhood.target_class
    y = [m.probs[target] for m in members]
    preds = [model.predict(m.tokens) for m in members]
    mean = sum(y) / len(y)
    ss_tot = sum((v - mean) ** 2 for v in y)
    if ss_tot == 0.0:
        return math.nan
    ss_res = sum((v - p) ** 2 for v, p in zip(y, preds))
    return 1.0 - ss_res / ss_tot


def _delete_tokens(attr: AttributionVector, threshold: float) -> list[tuple[str, float]]:
    seen: dict[str, float] = {}
    for _, token, score in attr.intrinsic:
        if score > threshold and token not in seen:
            seen[token] = score
    return list(seen.items())


def _insert_tokens(attr: AttributionVector, threshold: float) -> list[tuple[str, float]]:
    picked = [(t, s) for t, s in attr.extrinsic if s < -threshold]
    picked.sort(key=lambda item: (-abs(item[1]), item[0]))
    return picked


def _insert(text: TokenSeq, word: str, index: NgramIndex) -> TokenSeq:
    """Insertion-only edit at the most plausible site; append as fallback."""
    if not text:
        return (word,)
    op = best_edit(index, word, text, insert_only=True)
    if op is None:
        return text + (word,)
    return apply_edit(text, word, op)


def confidence_drop(
    attr: AttributionVector,
    explicand: TokenSeq,
    classifier: ClassifierHandle,
    index: NgramIndex,
    threshold: float = 0.1,
) -> float:
    """Target-class confidence lost after the full guided manipulation.

    Deletes every explicand token whose attribution exceeds +threshold,
    then inserts each extrinsic token scoring below -threshold into the
    current text, strongest first.
    """
    target = attr.target_class
    explicand = tuple(explicand)
    base = classifier.classify_one(explicand)[target]
    to_delete = {token for token, _ in _delete_tokens(attr, threshold)}
    text = tuple(t for t in explicand if t not in to_delete)
    for token, _ in _insert_tokens(attr, threshold):
        text = _insert(text, token, index)
    return base - classifier.classify_one(text)[target]


def aopc(
    attr: AttributionVector,
    explicand: TokenSeq,
    classifier: ClassifierHandle,
    index: NgramIndex,
    threshold: float = 0.1,
) -> float:
    """Mean cumulative confidence drop over sequential manipulation steps.

    The step set is the same as confidence_drop's; steps run one at a
    time in descending absolute attribution, and the drop against the
    original text is recorded after each. No relevant feature means 0.
    """
    steps = [("delete", token, score) for token, score in _delete_tokens(attr, threshold)]
    steps += [("insert", token, score) for token, score in _insert_tokens(attr, threshold)]
    steps.sort(key=lambda s: (-abs(s[2]), s[0], s[1]))
    if not steps:
        return 0.0
    target = attr.target_class
    explicand = tuple(explicand)
    base = classifier.classify_one(explicand)[target]
    text = explicand
    total = 0.0
    for kind, token, _ in steps:
        if kind == "delete":
            text = tuple(t for t in text if t != token)
        else:
            text = _insert(text, token, index)
        total += base - classifier.classify_one(text)[target]
    return total / len(steps)


# Default word pools for the stability study, usable with any sentiment
# classifier that maps class 0 to negative and class 1 to positive.
DEFAULT_NEGATIVE_ADJECTIVES = (
    "horrible terrible wrong awful disappointed poor bland worst bad cheap".split()
)
DEFAULT_POSITIVE_ADJECTIVES = (
    "delicious amazing excellent loved fantastic wonderful perfect fresh great best".split()
)
DEFAULT_ADJECTIVE_POOL = DEFAULT_NEGATIVE_ADJECTIVES + DEFAULT_POSITIVE_ADJECTIVES
DEFAULT_NOUN_POOL = "bread soup pizza food meal salad drink dessert fish steak".split()

STABILITY_TEMPLATES = (
    "{adj} {noun}",
    "very {adj} {noun}",
    "the {noun} is {adj}",
    "a very {adj} {noun}",
    "this is a very {adj} {noun}",
)


def select_stability_words(
    classifier: ClassifierHandle,
    adjective_pool: Sequence[str] | None = None,
    noun_pool: Sequence[str] | None = None,
    per_class: int = 10,
) -> tuple[list[str], list[str], list[str]]:
    """Pick test words by classifier confidence on single-word inputs.

    Returns (negative adjectives, positive adjectives, nouns): the
    `per_class` most confidently negative and positive adjectives, and
    the nouns whose predicted confidence sits closest to 0.5.
    """
    adjective_pool = list(adjective_pool or DEFAULT_ADJECTIVE_POOL)
    noun_pool = list(noun_pool or DEFAULT_NOUN_POOL)
    adj_preds = classifier.classify_batch([(w,) for w in adjective_pool])
    noun_preds = classifier.classify_batch([(w,) for w in noun_pool])

    def top(pool, preds, key):
        ranked = sorted(zip(pool, preds), key=key)
        if len(ranked) < per_class:
            log.warning("pool has only %d words, wanted %d", len(ranked), per_class)
        return [w for w, _ in ranked[:per_class]]

    negative = top(adjective_pool, adj_preds, lambda wp: (-wp[1][0], wp[0]))
    positive = top(adjective_pool, adj_preds, lambda wp: (-wp[1][1], wp[0]))
    nouns = top(noun_pool, noun_preds, lambda wp: (abs(max(wp[1]) - 0.5), wp[0]))
    return negative, positive, nouns


@dataclass
class StabilityCase:
    """One adjective/noun pair rendered through all five templates."""

    case_id: int
    adjective: str
    noun: str
    texts: list[TokenSeq]


@dataclass
class StabilityResult:
    case: StabilityCase
    adj_scores: list[float]
    noun_scores: list[float]
    f_confidences: list[float]  # probability of class 1 per text


def gen_stability_cases(
    adjectives: Sequence[str], nouns: Sequence[str]
) -> list[StabilityCase]:
    """One case per adjective-noun pair, five templated texts each."""
    cases = []
    case_id = 0
    for adj in adjectives:
        for noun in nouns:
            case_id += 1
            texts = [
                tokenize(template.format(adj=adj, noun=noun))
                for template in STABILITY_TEMPLATES
            ]
            cases.append(StabilityCase(case_id=case_id, adjective=adj, noun=noun, texts=texts))
    return cases


def intrinsic_score(attr: AttributionVector | None, word: str) -> float:
    """The word's intrinsic attribution; 0 with a warning when absent."""
    if attr is not None:
        for _, token, score in attr.intrinsic:
            if token == word:
                return score
    log.warning("no attribution for %r; scoring 0", word)
    return 0.0


def score_stability_cases(
    cases: Iterable[StabilityCase],
    explain: Callable[[TokenSeq], AttributionVector | None],
    classifier: ClassifierHandle,
) -> list[StabilityResult]:
    """Explain every templated text and collect the inserted words' scores.

    `explain` maps a token sequence to its attribution vector (None on a
    per-text failure, which scores 0).
    """
    results = []
    for case in cases:
        adj_scores, noun_scores, confidences = [], [], []
        for text in case.texts:
            attr = explain(text)
            adj_scores.append(intrinsic_score(attr, case.adjective))
            noun_scores.append(intrinsic_score(attr, case.noun))
            confidences.append(classifier.classify_one(text)[1])
        results.append(
            StabilityResult(
                case=case,
                adj_scores=adj_scores,
                noun_scores=noun_scores,
                f_confidences=confidences,
            )
        )
    return results


def _pstd(values: Sequence[float]) -> float:
    mean = sum(values) / len(values)
    return math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))


def stability_stats(results: Sequence[StabilityResult]) -> dict[str, float]:
    """Averaged per-case mean and population deviation per word category."""
    if not results:
        raise ValueError("no stability results to aggregate")
    n = len(results)
    return {
        "mu_adj": sum(sum(r.adj_scores) / len(r.adj_scores) for r in results) / n,
        "sigma_adj": sum(_pstd(r.adj_scores) for r in results) / n,
        "mu_noun": sum(sum(r.noun_scores) / len(r.noun_scores) for r in results) / n,
        "sigma_noun": sum(_pstd(r.noun_scores) for r in results) / n,
        "sigma_f": sum(_pstd(r.f_confidences) for r in results) / n,
    }


RESULTS_CSV_HEADER = ["explicand_id", "method", "r2", "fidelity", "confidence_drop", "aopc", "seconds"]
STABILITY_CSV_HEADER = ["case_id", "template", "adjective", "noun", "adj_score", "noun_score", "f_confidence"]


def write_results_csv(fh, rows: Iterable[tuple[int, str, MetricRecord]]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(RESULTS_CSV_HEADER)
    for explicand_id, method, rec in rows:
        writer.writerow(
            [
                explicand_id,
                method,
                f"{rec.r2:.6f}",
                f"{rec.fidelity:.6f}",
                f"{rec.confidence_drop:.6f}",
                f"{rec.aopc:.6f}",
                f"{rec.wall_time_seconds:.6f}",
            ]
        )


def write_stability_csv(fh, results: Iterable[StabilityResult]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(STABILITY_CSV_HEADER)
    for res in results:
        for template_id in range(len(res.case.texts)):
            writer.writerow(
                [
                    res.case.case_id,
                    template_id + 1,
                    res.case.adjective,
                    res.case.noun,
                    f"{res.adj_scores[template_id]:.6f}",
                    f"{res.noun_scores[template_id]:.6f}",
                    f"{res.f_confidences[template_id]:.6f}",
                ]
            )


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    finite = [v for v in values if not math.isnan(v)]
    if not finite:
        return math.nan, math.nan
    mean = sum(finite) / len(finite)
    std = math.sqrt(sum((v - mean) ** 2 for v in finite) / len(finite))
    return mean, std


def format_metric_summary(records_by_method: dict[str, Sequence[MetricRecord]]) -> str:
    """Mean +/- std per method, one aligned row each."""
    lines = [
        f"{'method':<8} {'r2':>15} {'fidelity':>15} {'confidence_drop':>17} "
        f"{'aopc':>15} {'sec/entry':>10}"
    ]
    for method, records in records_by_method.items():
        cells = []
        for getter in (
            lambda r: r.r2,
            lambda r: r.fidelity,
            lambda r: r.confidence_drop,
            lambda r: r.aopc,
        ):
            mean, std = _mean_std([getter(r) for r in records])
            cells.append(f"{mean:.3f} ± {std:.3f}")
        secs = sum(r.wall_time_seconds for r in records) / max(1, len(records))
        lines.append(
            f"{method:<8} {cells[0]:>15} {cells[1]:>15} {cells[2]:>17} "
            f"{cells[3]:>15} {secs:>10.3f}"
        )
    return "\n".join(lines)


def format_stability_summary(stats: dict[str, float]) -> str:
    return "\n".join(
        [
            f"{'category':<10} {'mean':>8} {'deviation':>10}",
            f"{'adjective':<10} {stats['mu_adj']:>8.3f} {stats['sigma_adj']:>10.3f}",
            f"{'noun':<10} {stats['mu_noun']:>8.3f} {stats['sigma_noun']:>10.3f}",
            f"{'f(.)':<10} {'':>8} {stats['sigma_f']:>10.3f}",
        ]
    )
