"""Builders shared across test modules."""

from fractions import Fraction

import numpy as np

from opinionnet import (
    Edge,
    ProjectionGraph,
    ResponseMatrix,
    SurveyItem,
    SurveySchema,
    binarize,
    binarized_agreement_weights,
    exact_agreement_weights,
    renormalize,
    score_weights,
)


def make_schema(scale_sizes, attrs=(), missing_token="NA"):
    items = tuple(SurveyItem(f"q{i:02d}", k) for i, k in enumerate(scale_sizes))
    return SurveySchema(items=items, id_column="pid", attribute_columns=tuple(attrs),
                        missing_token=missing_token)


def make_matrix(rows, scale_sizes, ids=None, attributes=None, schema=None):
    """ResponseMatrix from plain code rows; None marks a missing response."""
    if schema is None:
        attrs = tuple(attributes) if attributes else ()
        schema = make_schema(scale_sizes, attrs=attrs)
    n = len(rows)
    if ids is None:
        ids = [f"p{i:03d}" for i in range(n)]
    codes = np.array([[-1 if c is None else c for c in row] for row in rows], dtype=np.int16)
    return ResponseMatrix(schema, ids, codes, attributes=attributes)


def weights_from_rows(rows, scale_sizes, mode, count_neutral_pairs=True, rescale=False):
    matrix = make_matrix(rows, scale_sizes)
    if mode == "exact_agreement":
        return exact_agreement_weights(matrix)
    normalized = renormalize(matrix)
    if mode == "score":
        return score_weights(normalized, rescale_to_full=rescale)
    return binarized_agreement_weights(binarize(normalized),
                                       count_neutral_pairs=count_neutral_pairs)


def graph_from_edges(nodes, pairs, kind="participant", n_items=None, **kwargs):
    """ProjectionGraph with unit positive weights over explicit node ids."""
    edges = [Edge(u, v, Fraction(1)) for u, v in pairs]
    extra = kwargs.pop("extra", {})
    if n_items is not None:
        extra["n_items"] = n_items
    return ProjectionGraph(kind=kind, nodes=nodes, edges=edges, extra=extra, **kwargs)


def barbell_graph():
    """Two complete 4-cliques joined by a single bridge (13 edges)."""
    left = [f"a{i}" for i in range(4)]
    right = [f"b{i}" for i in range(4)]
    pairs = []
    for side in (left, right):
        for i in range(4):
            for j in range(i + 1, 4):
                pairs.append((side[i], side[j]))
    pairs.append((left[0], right[0]))
    return graph_from_edges(left + right, pairs)


def index_labels(components, nodes):
    """Map each node to the index of its component, in the given node order."""
    where = {}
    for ci, comp in enumerate(components):
        for u in comp:
            where[u] = ci
    return [where[u] for u in nodes]
