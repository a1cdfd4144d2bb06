"""The pairwise engine: agreement weights, similarity scores, and projections.

Three weight modes over participant pairs:

* exact_agreement: number of items answered identically (integer, 0..m).
* score: m minus the total absolute difference of normalized responses
  (rational, -m..+m); identical rows score +m, fully opposed extremes -m.
* binarized_agreement: number of items answered on the same side of the
  scale midpoint (integer, 0..m).

Weights are exact rationals held as integer numerators over one shared
denominator, computed blockwise with numpy so that surveys in the tens of
thousands of participants stay tractable. Thresholding compares exact
rationals; positive edges need w >= threshold, negative edges (disagreement
ties) need w <= negative_threshold.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ValidationError
from .ingest import ResponseMatrix
from .normalize import NormalizedMatrix, SignMatrix
from .rational import as_fraction

EXACT_AGREEMENT = "exact_agreement"
SCORE = "score"
BINARIZED_AGREEMENT = "binarized_agreement"

POSITIVE = "positive"
NEGATIVE = "negative"

SOLID = "solid"
DASHED = "dashed"
DOTTED = "dotted"

DEFAULT_BLOCK_ROWS = 512


def _thread_count(threads) -> int:
    if threads is None:
        threads = os.environ.get("OPINIONNET_THREADS", "1")
    try:
        threads = int(threads)
    except (TypeError, ValueError):
        raise ValidationError(f"invalid thread count {threads!r}") from None
    return max(1, threads)


def _block_ranges(n: int, block: int):
    block = max(1, int(block))
    for r0 in range(0, n, block):
        yield r0, min(r0 + block, n)


class PairWeights:
    """Symmetric pairwise weights over participants, derived from row features.

    Weights are never materialized for all pairs up front; consumers either
    ask for single pairs (exact Fractions) or stream numerator blocks.
    """

    def __init__(self, mode, participant_ids, features, mask, n_items, denominator,
                 rescale=False, count_neutral_pairs=True):
        n = features.shape[0]
        if n < 2:
            raise ValidationError("pairwise weights need at least 2 participants")
        self.mode = mode
        self.participant_ids = tuple(participant_ids)
        self.n_items = int(n_items)
        self.denominator = int(denominator)
        self.rescale = bool(rescale)
        self.count_neutral_pairs = bool(count_neutral_pairs)
        self._features = np.ascontiguousarray(features, dtype=np.int64)
        self._mask = np.ascontiguousarray(mask, dtype=bool)
        self._complete = bool(self._mask.all())

    @property
    def n_participants(self) -> int:
        return self._features.shape[0]

    @property
    def has_missing(self) -> bool:
        return not self._complete

    @property
    def numerator_offset(self) -> int:
        """Shift that maps numerators onto non-negative histogram indices."""
        if self.mode == SCORE:
            return self.n_items * self.denominator
        return 0

    def weight_range(self) -> tuple[Fraction, Fraction]:
        m = self.n_items
        if self.mode == SCORE:
            return Fraction(-m), Fraction(m)
        return Fraction(0), Fraction(m)

    def co_answered(self, u: int, v: int) -> int:
        """Number of items answered by both members of the pair."""
        self._check_pair(u, v)
        return int((self._mask[u] & self._mask[v]).sum())

    def weight(self, u: int, v: int) -> Fraction:
        """Exact weight of one unordered pair."""
        self._check_pair(u, v)
        both = self._mask[u] & self._mask[v]
        co = int(both.sum())
        fu, fv = self._features[u], self._features[v]
        if self.mode == SCORE:
            diff = int(np.abs(fu - fv)[both].sum())
            numer = co * self.denominator - diff
            if self.rescale:
                if co == 0:
                    return Fraction(0)
                return Fraction(self.n_items * numer, co * self.denominator)
            return Fraction(numer, self.denominator)
        eq = (fu == fv) & both
        if self.mode == BINARIZED_AGREEMENT and not self.count_neutral_pairs:
            eq &= ~((fu == 0) & (fv == 0))
        return Fraction(int(eq.sum()))

    def _check_pair(self, u: int, v: int) -> None:
        n = self.n_participants
        if u == v:
            raise ValidationError("no self-pairs")
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"pair index out of range: ({u}, {v})")

    def block_numerators(self, r0: int, r1: int, c0: int, c1: int):
        """Weight numerators (and co-answered counts) for rows x cols.

        Returns (numer, co); co is None for complete matrices. For score mode
        numer/denominator is the weight (numer = co*D - total difference);
        for the agreement modes the numerator is the integer weight itself.
        """
        fu = self._features[r0:r1]
        fv = self._features[c0:c1]
        rows, cols = r1 - r0, c1 - c0
        tmp = np.empty((rows, cols), dtype=np.int64)
        if self.mode == SCORE:
            acc = np.zeros((rows, cols), dtype=np.int64)
            if self._complete:
                for j in range(self.n_items):
                    np.subtract(fu[:, j, None], fv[None, :, j], out=tmp)
                    np.abs(tmp, out=tmp)
                    acc += tmp
                return self.n_items * self.denominator - acc, None
            mu = self._mask[r0:r1]
            mv = self._mask[c0:c1]
            co = np.zeros((rows, cols), dtype=np.int64)
            for j in range(self.n_items):
                both = mu[:, j, None] & mv[None, :, j]
                co += both
                np.subtract(fu[:, j, None], fv[None, :, j], out=tmp)
                np.abs(tmp, out=tmp)
                tmp *= both
                acc += tmp
            return co * self.denominator - acc, co

        acc = np.zeros((rows, cols), dtype=np.int64)
        mu = self._mask[r0:r1]
        mv = self._mask[c0:c1]
        co = None if self._complete else np.zeros((rows, cols), dtype=np.int64)
        drop_neutral = self.mode == BINARIZED_AGREEMENT and not self.count_neutral_pairs
        for j in range(self.n_items):
            eq = fu[:, j, None] == fv[None, :, j]
            if not self._complete:
                both = mu[:, j, None] & mv[None, :, j]
                co += both
                eq &= both
            if drop_neutral:
                eq &= ~((fu[:, j, None] == 0) & (fv[None, :, j] == 0))
            acc += eq
        return acc, co

    def _upper_mask(self, r0: int, r1: int, c0: int, c1: int):
        # True where the column's global index exceeds the row's (each pair once)
        return np.arange(c0, c1)[None, :] > np.arange(r0, r1)[:, None]

    def level_histogram(self, block_rows: int = DEFAULT_BLOCK_ROWS) -> np.ndarray:
        """Pair counts per weight numerator, indexed by numerator + offset."""
        if self.rescale:
            raise ValidationError("level histogram is undefined for rescaled pairwise weights")
        off = self.numerator_offset
        if self.mode == SCORE:
            size = 2 * self.n_items * self.denominator + 1
        else:
            size = self.n_items + 1
        hist = np.zeros(size, dtype=np.int64)
        n = self.n_participants
        for r0, r1 in _block_ranges(n, block_rows):
            numer, _ = self.block_numerators(r0, r1, r0, n)
            sel = numer[self._upper_mask(r0, r1, r0, n)]
            hist += np.bincount(sel + off, minlength=size)
        return hist

    def collect_pairs_in_range(self, lo_numer: int, hi_numer: int,
                               block_rows: int = DEFAULT_BLOCK_ROWS):
        """Yield (numerators, i, j) arrays for pairs with numerator in [lo, hi]."""
        n = self.n_participants
        for r0, r1 in _block_ranges(n, block_rows):
            numer, _ = self.block_numerators(r0, r1, r0, n)
            sel = (numer >= lo_numer) & (numer <= hi_numer)
            sel &= self._upper_mask(r0, r1, r0, n)
            ii, jj = np.nonzero(sel)
            if ii.size:
                yield numer[sel], ii + r0, jj + r0


def exact_agreement_weights(matrix: ResponseMatrix) -> PairWeights:
    """Per pair, the number of items both answered identically."""
    if matrix.n_participants < 2:
        raise ValidationError("exact agreement needs at least 2 participants")
    return PairWeights(
        EXACT_AGREEMENT,
        matrix.participant_ids,
        matrix.codes.astype(np.int64),
        matrix.mask,
        matrix.n_items,
        1,
    )


def score_weights(normalized: NormalizedMatrix, *, rescale_to_full: bool = False) -> PairWeights:
    """Similarity score per pair: item count minus total normalized difference.

    With pairwise-missing data the item count is replaced by the pair's
    co-answered count; rescale_to_full instead stretches such scores back to
    the full -m..+m range (weight * m / co_answered).
    """
    if normalized.n_participants < 2:
        raise ValidationError("score weights need at least 2 participants")
    return PairWeights(
        SCORE,
        normalized.participant_ids,
        normalized.numerators,
        normalized.mask,
        normalized.n_items,
        normalized.denominator,
        rescale=rescale_to_full,
    )


def binarized_agreement_weights(signs: SignMatrix, *, count_neutral_pairs: bool = True) -> PairWeights:
    """Per pair, the number of items answered on the same side of the midpoint.

    Two neutral answers to the same item count as agreement (it is an
    identical response); pass count_neutral_pairs=False to exclude them.
    """
    if signs.n_participants < 2:
        raise ValidationError("binarized agreement needs at least 2 participants")
    return PairWeights(
        BINARIZED_AGREEMENT,
        signs.participant_ids,
        signs.signs.astype(np.int64),
        signs.mask,
        signs.n_items,
        1,
        count_neutral_pairs=count_neutral_pairs,
    )


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    weight: Fraction
    sign: str = POSITIVE
    style: str = SOLID


class ProjectionGraph:
    """Weighted undirected graph over participants or attitudes.

    Simple graph with canonical ordering: endpoints sorted within each edge
    and the edge list sorted by (u, v, sign), both lexicographically by node
    id. Participant graphs carry one relation per pair; attitude graphs may
    carry a positive and a negative relation for the same pair.
    """

    __slots__ = ("kind", "nodes", "node_attrs", "edges", "threshold_used",
                 "negative_threshold_used", "extra", "_index")

    def __init__(self, kind, nodes, edges, node_attrs=None, threshold_used=None,
                 negative_threshold_used=None, extra=None):
        self.kind = kind
        self.nodes = [str(u) for u in nodes]
        if len(set(self.nodes)) != len(self.nodes):
            raise ValidationError("node ids must be unique")
        self._index = {u: i for i, u in enumerate(self.nodes)}
        canonical = []
        seen = set()
        for e in edges:
            u, v = str(e.u), str(e.v)
            if u == v:
                raise ValidationError(f"self-loop on node {u!r}")
            if u not in self._index or v not in self._index:
                raise ValidationError(f"edge ({u!r}, {v!r}) references an unknown node")
            if v < u:
                u, v = v, u
            key = (u, v, e.sign)
            if key in seen:
                raise ValidationError(f"duplicate {e.sign} edge ({u!r}, {v!r})")
            seen.add(key)
            canonical.append(Edge(u, v, as_fraction(e.weight), e.sign, e.style))
        canonical.sort(key=lambda e: (e.u, e.v, e.sign))
        self.edges = canonical
        attrs = dict(node_attrs) if node_attrs else {}
        self.node_attrs = {u: dict(attrs.get(u, {})) for u in self.nodes}
        self.threshold_used = None if threshold_used is None else as_fraction(threshold_used)
        self.negative_threshold_used = (
            None if negative_threshold_used is None else as_fraction(negative_threshold_used)
        )
        for e in self.edges:
            if e.sign == POSITIVE and self.threshold_used is not None:
                if e.weight < self.threshold_used:
                    raise ValidationError(
                        f"positive edge ({e.u!r}, {e.v!r}) has weight {e.weight} "
                        f"below the threshold {self.threshold_used}"
                    )
            elif e.sign == NEGATIVE and self.negative_threshold_used is not None:
                if e.weight > self.negative_threshold_used:
                    raise ValidationError(
                        f"negative edge ({e.u!r}, {e.v!r}) has weight {e.weight} "
                        f"above the negative threshold {self.negative_threshold_used}"
                    )
        self.extra = dict(extra) if extra else {}

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def node_index(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise ValidationError(f"unknown node id {node_id!r}") from None

    def positive_edges(self) -> list:
        return [e for e in self.edges if e.sign == POSITIVE]

    def negative_edges(self) -> list:
        return [e for e in self.edges if e.sign == NEGATIVE]

    def edge_index_arrays(self, sign: str = POSITIVE):
        """Endpoint index arrays (us, vs) for edges of one sign."""
        us = []
        vs = []
        for e in self.edges:
            if e.sign == sign:
                us.append(self._index[e.u])
                vs.append(self._index[e.v])
        return np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)

    def attribute_names(self) -> list:
        names = set()
        for attrs in self.node_attrs.values():
            names.update(attrs)
        return sorted(names)


def _select_block(numer, co, threshold: Fraction, weights: PairWeights, *, negative: bool):
    """Boolean selection of a numerator block against an exact threshold."""
    d = weights.denominator
    if weights.rescale and co is not None:  # rescale is the identity on complete data
        m = weights.n_items
        lhs = m * numer * threshold.denominator
        rhs = threshold.numerator * co * d
        hit = lhs <= rhs if negative else lhs >= rhs
        empty_hit = (0 <= threshold) if negative else (0 >= threshold)
        return np.where(co > 0, hit, empty_hit)
    lhs = numer * threshold.denominator
    rhs = threshold.numerator * d
    return lhs <= rhs if negative else lhs >= rhs


def _pair_weight_fraction(weights: PairWeights, numer: int, co) -> Fraction:
    if weights.rescale and co is not None:
        if not co:
            return Fraction(0)
        return Fraction(weights.n_items * int(numer), int(co) * weights.denominator)
    return Fraction(int(numer), weights.denominator)


def _check_threshold_precision(threshold: Fraction, weights: PairWeights) -> None:
    # int64 blockwise comparison must not overflow
    scale = weights.n_items * weights.denominator
    if abs(threshold.numerator) * scale >= 2**62 or threshold.denominator * scale >= 2**62:
        raise ValidationError(f"threshold {threshold} is too fine-grained for exact comparison")


def _scan_edges(weights: PairWeights, threshold, negative_threshold,
                block_rows: int, threads: int):
    """Blocked (optionally threaded) scan returning positive/negative pair lists.

    Blocks are processed independently and assembled in block order, so the
    result is identical for any thread count.
    """
    n = weights.n_participants
    ranges = list(_block_ranges(n, block_rows))

    def scan(block):
        r0, r1 = block
        numer, co = weights.block_numerators(r0, r1, r0, n)
        upper = weights._upper_mask(r0, r1, r0, n)
        out = []
        for negative, thr in ((False, threshold), (True, negative_threshold)):
            if thr is None:
                out.append(None)
                continue
            sel = _select_block(numer, co, thr, weights, negative=negative) & upper
            ii, jj = np.nonzero(sel)
            out.append((ii + r0, jj + r0, numer[sel], None if co is None else co[sel]))
        return out

    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(scan, ranges))
    else:
        results = [scan(b) for b in ranges]

    pos, neg = [], []
    for res in results:
        if res[0] is not None:
            pos.append(res[0])
        if res[1] is not None:
            neg.append(res[1])
    return pos, neg


def _within_group_pairs(grouped: dict) -> list:
    chunks = []
    for members in grouped.values():
        g = len(members)
        if g < 2:
            continue
        members = np.asarray(members, dtype=np.int64)
        ii, jj = np.triu_indices(g, k=1)
        chunks.append((members[ii], members[jj]))
    return chunks


def _bucketed_agreement_pairs(weights: PairWeights, threshold_int: int):
    """Pairs with exact-agreement weight >= m or m-1 without the full pair scan.

    Rows are grouped by their full response vector (weight m) and, for the
    m-1 level, by each leave-one-item-out sub-vector; only groups share
    qualifying pairs, so the cost is hashing plus output size. Returns
    (i, j, weight) index arrays sorted by (i, j).
    """
    features = weights._features
    n, m = features.shape
    packed = np.ascontiguousarray(features, dtype=np.int16)
    groups: dict[bytes, list[int]] = {}
    for i in range(n):
        groups.setdefault(packed[i].tobytes(), []).append(i)
    chunks = _within_group_pairs(groups)
    if threshold_int == m - 1:
        for j in range(m):
            sub = np.ascontiguousarray(np.delete(packed, j, axis=1))
            loo: dict[bytes, list[int]] = {}
            for i in range(n):
                loo.setdefault(sub[i].tobytes(), []).append(i)
            chunks.extend(_within_group_pairs(loo))
    if not chunks:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, empty
    ii = np.concatenate([c[0] for c in chunks])
    jj = np.concatenate([c[1] for c in chunks])
    encoded = np.unique(ii * n + jj)  # dedup; identical rows hit every bucket
    ii, jj = encoded // n, encoded % n
    agree = (features[ii] == features[jj]).sum(axis=1).astype(np.int64)
    return ii, jj, agree


def project_participants(weights: PairWeights, threshold, negative_threshold=None,
                         node_attrs=None, *, threads=None,
                         block_rows: int = DEFAULT_BLOCK_ROWS,
                         use_bucketing=None) -> ProjectionGraph:
    """Threshold pairwise weights into a participant graph.

    Positive edges link pairs with weight >= threshold; when a negative
    threshold is given, pairs with weight <= negative_threshold get negative
    (disagreement) edges. Isolated participants are retained as nodes.
    """
    threshold = as_fraction(threshold)
    lo, hi = weights.weight_range()
    if not (lo <= threshold <= hi):
        raise ValidationError(
            f"threshold {threshold} outside representable range [{lo}, {hi}] for {weights.mode}"
        )
    _check_threshold_precision(threshold, weights)
    neg = None
    if negative_threshold is not None:
        neg = as_fraction(negative_threshold)
        if not (lo <= neg <= hi):
            raise ValidationError(
                f"negative threshold {neg} outside representable range [{lo}, {hi}] for {weights.mode}"
            )
        if neg >= threshold:
            raise ValidationError(
                f"negative threshold {neg} must be strictly below threshold {threshold}"
            )
        _check_threshold_precision(neg, weights)

    ids = weights.participant_ids
    m = weights.n_items
    edges: list[Edge] = []

    bucketing_applicable = (
        weights.mode == EXACT_AGREEMENT
        and not weights.has_missing
        and neg is None
        and threshold.denominator == 1
        and int(threshold) in (m, m - 1)
    )
    if use_bucketing is None:
        use_bucketing = bucketing_applicable
    elif use_bucketing and not bucketing_applicable:
        raise ValidationError("bucketed projection applies only to complete exact-agreement "
                              "data at threshold m or m-1 without a negative threshold")

    if use_bucketing:
        ii, jj, agree = _bucketed_agreement_pairs(weights, int(threshold))
        edges = [
            Edge(ids[i], ids[j], Fraction(w), POSITIVE, SOLID)
            for i, j, w in zip(ii.tolist(), jj.tolist(), agree.tolist())
        ]
    else:
        pos_chunks, neg_chunks = _scan_edges(weights, threshold, neg, block_rows,
                                             _thread_count(threads))
        for ii, jj, numers, cos in pos_chunks:
            for k in range(len(ii)):
                w = _pair_weight_fraction(weights, numers[k], None if cos is None else cos[k])
                edges.append(Edge(ids[ii[k]], ids[jj[k]], w, POSITIVE, SOLID))
        for ii, jj, numers, cos in neg_chunks:
            for k in range(len(ii)):
                w = _pair_weight_fraction(weights, numers[k], None if cos is None else cos[k])
                edges.append(Edge(ids[ii[k]], ids[jj[k]], w, NEGATIVE, SOLID))

    return ProjectionGraph(
        kind="participant",
        nodes=ids,
        edges=edges,
        node_attrs=node_attrs,
        threshold_used=threshold,
        negative_threshold_used=neg,
        extra={"mode": weights.mode, "n_items": m},
    )


@dataclass
class AttitudeGraph:
    """Item-pair co-endorsement counts over N participants.

    For each unordered item pair, pos_count participants scored both items
    positively and neg_count scored both negatively; participants neutral or
    missing on either item contribute to neither, so pos + neg <= N.
    """

    items: tuple
    n_participants: int
    pos_counts: dict
    neg_counts: dict

    def count(self, a: str, b: str) -> tuple[int, int]:
        key = (a, b) if a <= b else (b, a)
        return self.pos_counts[key], self.neg_counts[key]

    def to_projection(self, mode: str = "dual") -> "ProjectionGraph":
        return style_edges(self, mode=mode)


def project_attitudes(normalized: NormalizedMatrix) -> AttitudeGraph:
    """Project items onto an attitude graph of co-endorsement counts."""
    if normalized.n_items < 2:
        raise ValidationError("attitude projection needs at least 2 items")
    pos = (normalized.numerators > 0) & normalized.mask
    neg = (normalized.numerators < 0) & normalized.mask
    pos_mat = pos.T.astype(np.int64) @ pos.astype(np.int64)
    neg_mat = neg.T.astype(np.int64) @ neg.astype(np.int64)
    items = normalized.schema.item_ids
    pos_counts = {}
    neg_counts = {}
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            key = (items[a], items[b]) if items[a] <= items[b] else (items[b], items[a])
            pos_counts[key] = int(pos_mat[a, b])
            neg_counts[key] = int(neg_mat[a, b])
    return AttitudeGraph(tuple(items), normalized.n_participants, pos_counts, neg_counts)


def thirds_style(count, total) -> str | None:
    """Style class by thirds of the total: (0, T/3] dotted, (T/3, 2T/3] dashed,
    (2T/3, T] solid; zero or negative counts get no edge.

    Boundaries are exact: a count of exactly T/3 is dotted, exactly 2T/3 dashed.
    """
    count = as_fraction(count)
    total = as_fraction(total)
    if count <= 0:
        return None
    if 3 * count <= total:
        return DOTTED
    if 3 * count <= 2 * total:
        return DASHED
    return SOLID


def _restyle_projection(graph: ProjectionGraph) -> ProjectionGraph:
    if graph.kind == "attitude":
        total = graph.extra.get("n_participants")
        if total is None:
            raise ValidationError("attitude graph lacks its participant count; cannot style")
    else:
        total = graph.extra.get("n_items")
        if total is None:
            raise ValidationError("participant graph lacks its item count; cannot style")
    styled = []
    for e in graph.edges:
        style = thirds_style(abs(e.weight), total)
        styled.append(Edge(e.u, e.v, e.weight, e.sign, style or DOTTED))
    return ProjectionGraph(
        kind=graph.kind,
        nodes=graph.nodes,
        edges=styled,
        node_attrs=graph.node_attrs,
        threshold_used=graph.threshold_used,
        negative_threshold_used=graph.negative_threshold_used,
        extra=graph.extra,
    )


def style_edges(graph, mode: str = "dual") -> ProjectionGraph:
    """Apply thirds styling; for attitude counts, build the styled graph.

    An AttitudeGraph becomes a ProjectionGraph: in dual mode each item pair
    may carry a positive edge weighted +pos_count and a negative edge weighted
    -neg_count, each styled by thirds of N. In signed mode a single edge
    carries pos_count - neg_count. Zero counts produce no edge. An existing
    ProjectionGraph is restyled by thirds of |weight| over its weight range
    total (N for attitude graphs, item count for participant graphs).
    """
    if isinstance(graph, ProjectionGraph):
        return _restyle_projection(graph)
    if not isinstance(graph, AttitudeGraph):
        raise ValidationError(f"cannot style object of type {type(graph).__name__}")
    if mode not in ("dual", "signed"):
        raise ValidationError(f"unknown attitude mode {mode!r}; expected 'dual' or 'signed'")
    n = graph.n_participants
    edges = []
    for (a, b), p in graph.pos_counts.items():
        q = graph.neg_counts[(a, b)]
        if mode == "dual":
            style = thirds_style(p, n)
            if style is not None:
                edges.append(Edge(a, b, Fraction(p), POSITIVE, style))
            style = thirds_style(q, n)
            if style is not None:
                edges.append(Edge(a, b, Fraction(-q), NEGATIVE, style))
        else:
            w = p - q
            style = thirds_style(abs(w), n)
            if style is not None:
                sign = POSITIVE if w > 0 else NEGATIVE
                edges.append(Edge(a, b, Fraction(w), sign, style))
    return ProjectionGraph(
        kind="attitude",
        nodes=graph.items,
        edges=edges,
        threshold_used=Fraction(1),
        negative_threshold_used=Fraction(-1),
        extra={"n_participants": n, "attitude_mode": mode},
    )
