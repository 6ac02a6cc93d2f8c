"""Synthetic restaurant-review generator for desk-scale runs.

Produces short sentiment lines from a template grammar whose vocabulary
includes the stability study's default adjective and noun pools. Nouns
are drawn independently of the sentiment so they stay neutral; labels
follow the adjective polarity, with a small slice of neutral noise lines
to keep classifier confidences off the extremes. The combinatorial space
is large enough that a 2k-line sample undersamples it noticeably, which
is what makes corpus-size sweeps informative.
"""

from __future__ import annotations

import random

POSITIVE_ADJECTIVES = (
    "delicious amazing excellent loved fantastic wonderful perfect fresh great best "
    "good tasty lovely superb juicy crisp generous charming delightful splendid"
).split()

NEGATIVE_ADJECTIVES = (
    "horrible terrible wrong awful disappointed poor bland worst bad cheap "
    "stale greasy rude slow dirty soggy bitter salty burnt dreadful"
).split()

NOUNS = (
    "bread soup pizza food meal salad drink dessert fish steak "
    "service staff place pasta burger coffee cake tea rice chicken "
    "sauce menu portion table wine cheese sandwich noodles curry toast"
).split()

# {adj}/{adj2} share one polarity within a line; {noun}/{noun2} are always
# independent of it.
TEMPLATES = [
    "the {noun} was {adj}",
    "the {noun} is {adj}",
    "{adj} {noun}",
    "very {adj} {noun}",
    "a very {adj} {noun}",
    "this is a very {adj} {noun}",
    "the {noun} was really {adj}",
    "the {noun} was so {adj}",
    "{adj} {noun} and {adj2} {noun2}",
    "the {noun} was {adj} and the {noun2} was {adj2}",
    "i found the {noun} quite {adj}",
    "what a {adj} {noun}",
    "{adj} and {adj2} {noun}",
    "the {noun} and the {noun2} were both {adj}",
    "honestly the {noun} was just {adj}",
    "such a {adj} {noun}",
    "{adj} {adj2} {noun}",
    "the {noun} here is always {adj}",
]

POSITIVE_EXTRAS = [
    "we loved the {noun} here",
    "i will order the {noun} again",
    "the {noun} made my day",
]

NEGATIVE_EXTRAS = [
    "we hated the {noun} here",
    "i will never order the {noun} again",
    "the {noun} ruined my evening",
]

NEUTRAL_TEMPLATES = [
    "the {noun} was okay",
    "average {noun}",
    "we ordered the {noun} and the {noun2}",
]

NEUTRAL_SHARE = 0.04


def _sample_line(rng: random.Random) -> tuple[str, str]:
    if rng.random() < NEUTRAL_SHARE:
        template = rng.choice(NEUTRAL_TEMPLATES)
        label = rng.choice(("0", "1"))
    else:
        label = rng.choice(("0", "1"))
        adjectives = POSITIVE_ADJECTIVES if label == "1" else NEGATIVE_ADJECTIVES
        extras = POSITIVE_EXTRAS if label == "1" else NEGATIVE_EXTRAS
        pool = TEMPLATES + extras
        template = rng.choice(pool)
        return label, template.format(
            adj=rng.choice(adjectives),
            adj2=rng.choice(adjectives),
            noun=rng.choice(NOUNS),
            noun2=rng.choice(NOUNS),
        )
    return label, template.format(noun=rng.choice(NOUNS), noun2=rng.choice(NOUNS))


def generate_labeled(count: int, seed: int) -> list[tuple[str, str]]:
    rng = random.Random(seed)
    return [_sample_line(rng) for _ in range(count)]


def generate_corpus_lines(count: int, seed: int) -> list[str]:
    rng = random.Random(seed)
    return [_sample_line(rng)[1] for _ in range(count)]


def write_corpus(path: str, count: int, seed: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in generate_corpus_lines(count, seed):
            fh.write(line + "\n")


def write_labeled(path: str, count: int, seed: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for label, text in generate_labeled(count, seed):
            fh.write(f"{label}\t{text}\n")
