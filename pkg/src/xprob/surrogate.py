"""Locally weighted linear surrogate and the attribution split.

The surrogate regresses the black box's probability for the explicand's
predicted class on binary token-presence features over the neighborhood
vocabulary, each member weighted by exp(-d^2 / sigma^2) of its cosine
distance to the explicand. A small ridge term keeps the normal equations
well-posed when the vocabulary outgrows the member count; the intercept
is never penalized. Coefficients of tokens inside the explicand are its
intrinsic attributions; the rest are extrinsic words the model reacts to
in this region of the input space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import TokenSeq
from .errors import SurrogateFitError
from .neighborhood import Neighborhood


@dataclass
class SurrogateModel:
    coefficients: dict[str, float]
    intercept: float
    sigma: float
    feature_space: list[str]
    target_class: int

    def predict(self, tokens: TokenSeq) -> float:
        present = set(tokens)
        return self.intercept + sum(
            coef for token, coef in self.coefficients.items() if token in present
        )


@dataclass
class AttributionVector:
    """Per-token scores split by explicand membership.

    intrinsic lists (position, token, score) for every explicand
    position; repeated tokens share their type's coefficient. extrinsic
    lists every other token with a nonzero coefficient, strongest first.
    """

    intrinsic: list[tuple[int, str, float]]
    extrinsic: list[tuple[str, float]]
    target_class: int

    def reported_extrinsic(self, threshold: float) -> list[tuple[str, float]]:
        return [(t, s) for t, s in self.extrinsic if abs(s) >= threshold]


def compute_weights(neighborhood: Neighborhood, sigma: float) -> list[float]:
    """Locality kernel exp(-d^2 / sigma^2) per member."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return [math.exp(-(m.distance**2) / (sigma**2)) for m in neighborhood.members]


def fit_surrogate(neighborhood: Neighborhood, sigma: float, ridge: float) -> SurrogateModel:
    """Solve the weighted ridge least squares over binary presence features."""
    members = neighborhood.members
    if len(members) < 2:
        raise SurrogateFitError(f"need at least 2 members, got {len(members)}")
    feature_space = sorted({token for m in members for token in m.tokens})
    col = {token: idx for idx, token in enumerate(feature_space)}

    m, f = len(members), len(feature_space)
    design = np.zeros((m, f + 1))
    design[:, 0] = 1.0
    for row, member in enumerate(members):
        for token in set(member.tokens):
            design[row, col[token] + 1] = 1.0
    y = np.array([member.probs[neighborhood.target_class] for member in members])
    w = np.asarray(compute_weights(neighborhood, sigma))

    weighted = design * w[:, None]
    gram = design.T @ weighted
    gram[1:, 1:] += ridge * np.eye(f)
    rhs = weighted.T @ y
    try:
        beta = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise SurrogateFitError(f"normal equations are singular: {exc}") from exc
    if not np.all(np.isfinite(beta)):
        raise SurrogateFitError("non-finite surrogate coefficients")

    coefficients = {token: float(beta[col[token] + 1]) for token in feature_space}
    return SurrogateModel(
        coefficients=coefficients,
        intercept=float(beta[0]),
        sigma=sigma,
        feature_space=feature_space,
        target_class=neighborhood.target_class,
    )


def split_attributions(model: SurrogateModel, explicand: TokenSeq) -> AttributionVector:
    """Partition coefficients into in-explicand and introduced tokens."""
    intrinsic = [
        (pos, token, model.coefficients.get(token, 0.0))
        for pos, token in enumerate(explicand)
    ]
    inside = set(explicand)
    extrinsic = [
        (token, coef)
        for token, coef in model.coefficients.items()
        if token not in inside and coef != 0.0
    ]
    extrinsic.sort(key=lambda item: (-abs(item[1]), item[0]))
    return AttributionVector(
        intrinsic=intrinsic, extrinsic=extrinsic, target_class=model.target_class
    )
