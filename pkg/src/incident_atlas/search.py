"""Faceted filtering and TF-IDF keyword search over assessed uses.

The index is built once from a dataset and is immutable afterward, so
concurrent readers need no locks. Facet values are the observed strings,
normalized to lowercase-trimmed form; the SDG facet is keyed on the goal
number regardless of direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import TfidfModel, build_document, fit_tfidf, tokenize
from .errors import InputError
from .model import UseRecord

FACET_NAMES = ("domain", "ai_user", "ai_subject", "risk", "sdg")


@dataclass(frozen=True)
class SearchHit:
    use_id: str
    score: float
    matched_terms: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "use_id": self.use_id,
            "score": self.score,
            "matched_terms": list(self.matched_terms),
        }


def _facet_values(use: UseRecord, facet: str) -> list[str]:
    if facet == "risk":
        return [use.risk.value]
    if facet == "sdg":
        return sorted({str(impact.sdg_id) for impact in use.sdg_impacts})
    return [getattr(use, facet).strip().lower()]


class AtlasIndex:
    """Facet map plus TF-IDF search structures for one immutable corpus."""

    def __init__(self, uses: list[UseRecord]):
        self.uses = list(uses)
        self.use_ids = [u.use_id for u in uses]
        self.facets: dict[str, dict[str, set[str]]] = {name: {} for name in FACET_NAMES}
        for use in uses:
            for facet in FACET_NAMES:
                for value in _facet_values(use, facet):
                    self.facets[facet].setdefault(value, set()).add(use.use_id)

        self._documents = [build_document(u) for u in uses]
        self._model: TfidfModel | None = (
            fit_tfidf(self._documents, self.use_ids) if uses else None
        )

    def facet_counts(self) -> dict[str, dict[str, int]]:
        return {
            facet: {value: len(ids) for value, ids in sorted(values.items())}
            for facet, values in self.facets.items()
        }

    def search(self, query: str, limit: int = 10) -> list[SearchHit]:
        """Rank uses by cosine similarity to the query in the corpus TF-IDF space.

        Query terms outside the corpus vocabulary are ignored; zero-score
        uses are omitted; ties break by use_id ascending.
        """
        if limit < 1:
            raise InputError(f"limit must be a positive integer, got {limit}")
        if self._model is None:
            return []
        query_vector = self._model.transform(query)
        if not np.any(query_vector):
            return []
        scores = self._model.matrix @ query_vector
        query_terms = list(dict.fromkeys(tokenize(query)))
        ranked = sorted(
            (i for i in range(len(self.uses)) if scores[i] > 0.0),
            key=lambda i: (-scores[i], self.use_ids[i]),
        )
        hits = []
        for i in ranked[:limit]:
            matched = tuple(
                t for t in query_terms if t in self._model.doc_tokens[i]
            )
            hits.append(SearchHit(self.use_ids[i], float(scores[i]), matched))
        return hits

    def filter(self, selections: dict[str, set[str]]) -> set[str]:
        """OR within a facet, AND across facets; no selections means every use."""
        for facet in selections:
            if facet not in FACET_NAMES:
                raise InputError(
                    f"unknown facet {facet!r}; expected one of {', '.join(FACET_NAMES)}"
                )
        result = set(self.use_ids)
        for facet, values in selections.items():
            matched: set[str] = set()
            for value in values:
                matched |= self.facets[facet].get(value, set())
            result &= matched
        return result


def build_index(uses: list[UseRecord]) -> AtlasIndex:
    return AtlasIndex(uses)
