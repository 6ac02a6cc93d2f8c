"""Instance-level explanations and report rendering.

Factual and counterfactual examples are picked from the neighborhood by
a greedy rule balancing closeness to the explicand against diversity of
the manipulation directions already chosen, so the lists do not collapse
into near-duplicates. Reports render to JSON (lossless round trip), a
static HTML saliency view, or an aligned console table.
"""

from __future__ import annotations

import html as html_lib
import json
import math
from dataclasses import dataclass

from .corpus import SparseVector, TfidfModel, TokenSeq, cosine_distance, vectorize
from .neighborhood import Neighborhood, _argmax
from .surrogate import AttributionVector

SCHEMA_VERSION = 1


@dataclass
class InstanceExplanation:
    factuals: list[TokenSeq]
    counterfactuals: list[TokenSeq]
    balance: float  # closeness/diversity trade-off in [0, 1]


@dataclass
class ExplanationReport:
    """Self-contained explanation: no engine state needed to re-render."""

    explicand: TokenSeq
    predicted_class: int
    confidence: float
    attribution: AttributionVector
    instances: InstanceExplanation
    meta: dict


def _sparse_diff(a: SparseVector, b: SparseVector) -> SparseVector:
    out = dict(a)
    for col, w in b.items():
        v = out.get(col, 0.0) - w
        if v == 0.0:
            out.pop(col, None)
        else:
            out[col] = v
    return out


def _direction_distance(u: SparseVector, v: SparseVector) -> float:
    """Cosine distance between unnormalized direction vectors; zero -> 1."""
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    if nu == 0.0 or nv == 0.0:
        return 1.0
    if len(v) < len(u):
        u, v = v, u
    dot = sum(w * v.get(col, 0.0) for col, w in u.items())
    return 1.0 - dot / (nu * nv)


def select_instances(
    neighborhood: Neighborhood,
    explicand: TokenSeq,
    tfidf: TfidfModel,
    balance: float,
    m: int,
) -> InstanceExplanation:
    """Greedily pick m factuals and m counterfactuals.

    Each step adds the candidate maximizing
    balance * (1 - d(candidate, explicand))
      + (1 - balance) * mean direction distance to the already picked,
    where a candidate's direction is tfidf(candidate) - tfidf(explicand).
    The first pick uses closeness alone; ties go to the earlier
    neighborhood member.
    """
    if not 0.0 <= balance <= 1.0:
        raise ValueError(f"balance must be in [0, 1], got {balance}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    explicand_vec = vectorize(tfidf, explicand)

    def pick(pool):
        directions = {
            idx: _sparse_diff(vectorize(tfidf, member.tokens), explicand_vec)
            for idx, member in pool
        }
        chosen: list[int] = []
        remaining = list(pool)
        while remaining and len(chosen) < m:
            best_idx, best_score = None, -math.inf
            for idx, member in remaining:
                if chosen:
                    diversity = sum(
                        _direction_distance(directions[idx], directions[c]) for c in chosen
                    ) / len(chosen)
                else:
                    diversity = 0.0
                score = balance * (1.0 - member.distance) + (1.0 - balance) * diversity
                if score > best_score:
                    best_idx, best_score = idx, score
            chosen.append(best_idx)
            remaining = [(idx, mem) for idx, mem in remaining if idx != best_idx]
        by_idx = dict(pool)
        return [by_idx[idx].tokens for idx in chosen]

    factual_pool = []
    counter_pool = []
    for idx, member in enumerate(neighborhood.members):
        if _argmax(member.probs) == neighborhood.target_class:
            factual_pool.append((idx, member))
        else:
            counter_pool.append((idx, member))
    return InstanceExplanation(
        factuals=pick(factual_pool),
        counterfactuals=pick(counter_pool),
        balance=balance,
    )


def build_report(
    explicand: TokenSeq,
    probs,
    attribution: AttributionVector,
    instances: InstanceExplanation,
    meta: dict,
    extrinsic_threshold: float = 0.1,
) -> ExplanationReport:
    """Assemble the report; extrinsic words below the threshold are left out."""
    target = attribution.target_class
    reported = AttributionVector(
        intrinsic=list(attribution.intrinsic),
        extrinsic=attribution.reported_extrinsic(extrinsic_threshold),
        target_class=target,
    )
    return ExplanationReport(
        explicand=tuple(explicand),
        predicted_class=target,
        confidence=float(probs[target]),
        attribution=reported,
        instances=instances,
        meta=dict(meta),
    )


def report_to_dict(report: ExplanationReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "explicand": " ".join(report.explicand),
        "prediction": {"class": report.predicted_class, "confidence": report.confidence},
        "attributions": {
            "intrinsic": [
                {"position": pos, "token": tok, "score": score}
                for pos, tok, score in report.attribution.intrinsic
            ],
            "extrinsic": [
                {"token": tok, "score": score} for tok, score in report.attribution.extrinsic
            ],
        },
        "instances": {
            "factuals": [" ".join(t) for t in report.instances.factuals],
            "counterfactuals": [" ".join(t) for t in report.instances.counterfactuals],
        },
        "meta": report.meta,
    }


def report_from_dict(payload: dict) -> ExplanationReport:
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {payload.get('schema_version')}")
    attribution = AttributionVector(
        intrinsic=[
            (entry["position"], entry["token"], entry["score"])
            for entry in payload["attributions"]["intrinsic"]
        ],
        extrinsic=[
            (entry["token"], entry["score"]) for entry in payload["attributions"]["extrinsic"]
        ],
        target_class=payload["prediction"]["class"],
    )
    instances = InstanceExplanation(
        factuals=[tuple(t.split()) for t in payload["instances"]["factuals"]],
        counterfactuals=[tuple(t.split()) for t in payload["instances"]["counterfactuals"]],
        balance=payload["meta"]["lambda"],
    )
    return ExplanationReport(
        explicand=tuple(payload["explicand"].split()),
        predicted_class=payload["prediction"]["class"],
        confidence=payload["prediction"]["confidence"],
        attribution=attribution,
        instances=instances,
        meta=dict(payload["meta"]),
    )


def render(report: ExplanationReport, format: str) -> bytes:
    """Serialize the report as json, html, or text."""
    if format == "json":
        return (json.dumps(report_to_dict(report), ensure_ascii=False) + "\n").encode("utf-8")
    if format == "html":
        return _render_html(report).encode("utf-8")
    if format == "text":
        return _render_text(report).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


_BLUE = "37, 99, 235"
_RED = "220, 38, 38"


def _saliency_span(token: str, score: float, target_class: int) -> str:
    escaped = html_lib.escape(token)
    support_positive = score if target_class == 1 else -score
    if support_positive == 0.0:
        return escaped
    color = _BLUE if support_positive > 0 else _RED
    opacity = min(abs(score), 1.0)
    return (
        f'<span style="background-color: rgba({color}, {opacity:.2f})" '
        f'title="{score:+.3f}">{escaped}</span>'
    )


def _render_html(report: ExplanationReport) -> str:
    target = report.predicted_class
    saliency = " ".join(
        _saliency_span(tok, score, target) for _, tok, score in report.attribution.intrinsic
    )
    extrinsic = " ".join(
        _saliency_span(tok, score, target) for tok, score in report.attribution.extrinsic
    )
    items = lambda texts: "\n".join(
        f"<li>{html_lib.escape(' '.join(t))}</li>" for t in texts
    )
    meta_rows = "\n".join(
        f"<tr><td>{html_lib.escape(str(k))}</td><td>{html_lib.escape(str(v))}</td></tr>"
        for k, v in report.meta.items()
    )
    return f"""<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>Explanation: {html_lib.escape(" ".join(report.explicand))}</title>
<style>
body {{ font-family: sans-serif; max-width: 52rem; margin: 2rem auto; }}
span {{ padding: 0 0.15em; border-radius: 3px; }}
table {{ border-collapse: collapse; }} td {{ border: 1px solid #ccc; padding: 0.2em 0.6em; }}
</style>
</head>
<body>
<h1>Explanation report</h1>
<p><b>Prediction:</b> class {report.predicted_class} (confidence {report.confidence:.3f})</p>
<h2>Saliency</h2>
<p>{saliency}</p>
<h2>Extrinsic words</h2>
<p>{extrinsic or "(none above threshold)"}</p>
<h2>Factuals</h2>
<ol>{items(report.instances.factuals)}</ol>
<h2>Counterfactuals</h2>
<ol>{items(report.instances.counterfactuals)}</ol>
<h2>Run metadata</h2>
<table>{meta_rows}</table>
</body>
</html>
"""


def _render_text(report: ExplanationReport) -> str:
    lines = []
    lines.append(f"Explicand:  {' '.join(report.explicand)}")
    lines.append(
        f"Prediction: class {report.predicted_class} (confidence {report.confidence:.3f})"
    )
    lines.append("")
    lines.append("Intrinsic attributions:")
    lines.append(f"  {'pos':>3}  {'token':<20} {'score':>8}")
    for pos, tok, score in report.attribution.intrinsic:
        lines.append(f"  {pos:>3}  {tok:<20} {score:>+8.3f}")
    lines.append("")
    lines.append("Extrinsic words:")
    if report.attribution.extrinsic:
        for tok, score in report.attribution.extrinsic:
            lines.append(f"       {tok:<20} {score:>+8.3f}")
    else:
        lines.append("       (none above threshold)")
    for title, texts in (
        ("Factuals", report.instances.factuals),
        ("Counterfactuals", report.instances.counterfactuals),
    ):
        lines.append("")
        lines.append(f"{title}:")
        for rank, tokens in enumerate(texts, start=1):
            lines.append(f"  {rank}) {' '.join(tokens)}")
    lines.append("")
    return "\n".join(lines)
