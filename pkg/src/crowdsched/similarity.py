"""Pairwise task similarity over seven heterogeneous features.

Each feature is first mapped to a similarity in [0, 1] (distances become
1 - normalized distance, matches become indicators), then the seven
components are aggregated into a single score: the ratio of the component
vector's Euclidean magnitude to the magnitude of the all-ones vector.  That
aggregate is 1 exactly for identical tasks, 0 for a fully dissimilar pair,
symmetric, and never decreases when any single component grows - properties a
plain cosine against the ones vector does not all deliver.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .model import CorpusNorms, Task

N_FEATURES = 7

_TOKEN = re.compile(r"[a-z0-9]+")


def _tokens(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def text_similarity(text_a: str, text_b: str) -> float:
    """Cosine similarity of term-frequency vectors.

    Tokenization is lowercase alphanumeric runs; no stemming or stop words.
    Equal texts score 1; otherwise an empty side scores 0.
    """
    tokens_a, tokens_b = _tokens(text_a), _tokens(text_b)
    if tokens_a == tokens_b:
        return 1.0
    if not tokens_a or not tokens_b:
        return 0.0
    freq_a, freq_b = Counter(tokens_a), Counter(tokens_b)
    dot = sum(freq_a[w] * freq_b[w] for w in sorted(freq_a.keys() & freq_b.keys()))
    if dot == 0:
        return 0.0
    norm_a = math.sqrt(sum(c * c for c in freq_a.values()))
    norm_b = math.sqrt(sum(c * c for c in freq_b.values()))
    return min(1.0, dot / (norm_a * norm_b))


def _ratio_similarity(value_a: float, value_b: float, denominator: float) -> float:
    # A zero corpus maximum means the whole corpus agrees on this feature.
    if denominator <= 0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - abs(value_a - value_b) / denominator))


def feature_vector(a: Task, b: Task, norms: CorpusNorms) -> np.ndarray:
    """The seven per-feature similarities for a task pair, each in [0, 1]."""
    if a.technologies == b.technologies:
        tech = 1.0
    elif norms.tech_count_max <= 0:
        tech = 1.0
    else:
        overlap = len(a.technologies & b.technologies)
        tech = min(1.0, overlap / norms.tech_count_max)
    return np.array(
        [
            _ratio_similarity(a.prize, b.prize, norms.prize_max),
            _ratio_similarity(a.registration_start, b.registration_start, norms.reg_date_max),
            _ratio_similarity(a.submission_end, b.submission_end, norms.sub_date_max),
            1.0 if a.task_type == b.task_type else 0.0,
            tech,
            1.0 if a.platforms == b.platforms else 0.0,
            text_similarity(a.requirement_text, b.requirement_text),
        ]
    )


def aggregate_components(components: Sequence[float]) -> float:
    """Fold per-feature similarities into one score in [0, 1].

    Score = ||v|| / ||ones||, i.e. the quadratic mean of the components.
    The all-zero vector maps to 0 by definition rather than dividing by zero.
    """
    v = np.asarray(components, dtype=float)
    norm = float(np.sqrt(np.dot(v, v)))
    if norm == 0.0:
        return 0.0
    return min(1.0, norm / math.sqrt(len(v)))


def task_similarity(a: Task, b: Task, norms: CorpusNorms) -> float:
    """Overall similarity between two tasks, in [0, 1]."""
    return aggregate_components(feature_vector(a, b, norms))


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric all-pairs similarity scores, indexed by task id."""

    task_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.task_ids), len(self.task_ids)):
            raise ValueError("matrix shape must match the task id count")

    def index_of(self, task_id: str) -> int:
        return self.task_ids.index(task_id)

    def score(self, id_a: str, id_b: str) -> float:
        return float(self.values[self.index_of(id_a), self.index_of(id_b)])

    def write_csv(self, target: str | Path | TextIO, delimiter: str = ",") -> None:
        """Export with id headers on both axes, 6 decimal places."""
        own = isinstance(target, (str, Path))
        stream = open(target, "w", encoding="utf-8") if own else target
        try:
            stream.write(delimiter.join(["task_id", *self.task_ids]) + "\n")
            for i, tid in enumerate(self.task_ids):
                cells = [f"{self.values[i, j]:.6f}" for j in range(len(self.task_ids))]
                stream.write(delimiter.join([tid, *cells]) + "\n")
        finally:
            if own:
                stream.close()


def similarity_matrix(tasks: Sequence[Task], norms: CorpusNorms) -> SimilarityMatrix:
    """All-pairs task similarity; symmetric with a unit diagonal."""
    n = len(tasks)
    values = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            score = task_similarity(tasks[i], tasks[j], norms)
            values[i, j] = score
            values[j, i] = score
    return SimilarityMatrix(tuple(t.task_id for t in tasks), values)
