"""Component structure, threshold selection, edge betweenness, and communities.

Conventions used throughout:

* Components and paths are computed over positive edges only by default;
  negative edges express disagreement, not connection.
* Node ids are compared lexicographically wherever a deterministic order or
  tie-break is needed.
* Edge betweenness counts each unordered node pair once, splitting equally
  among all shortest paths. The default engine accumulates in float64
  (deterministic, within 1e-9 of exact values); exact=True switches to
  Fraction arithmetic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NoGiantComponentError, ValidationError
from .normalize import SignMatrix
from .project import PairWeights, ProjectionGraph, DEFAULT_BLOCK_ROWS
from .rational import as_fraction, format_fraction

DEFAULT_PAIR_BUDGET = 2_000_000


class UnionFind:
    """Disjoint sets over 0..n-1 with union by size and path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.n_components = n
        self.largest = 1 if n else 0

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.n_components -= 1
        if self.size[ra] > self.largest:
            self.largest = self.size[ra]

    def groups(self) -> dict:
        out: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass
class ComponentReport:
    """Partition of the node set, largest component first."""

    components: list
    giant_fraction: Fraction
    n_nodes: int

    def to_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "giant_fraction": format_fraction(self.giant_fraction),
            "giant_fraction_decimal": float(self.giant_fraction),
            "component_sizes": [len(c) for c in self.components],
            "components": [list(c) for c in self.components],
        }


def _grouped_components(n_nodes, nodes, us, vs):
    uf = UnionFind(n_nodes)
    for a, b in zip(us, vs):
        uf.union(int(a), int(b))
    comps = [sorted(nodes[i] for i in members) for members in uf.groups().values()]
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def connected_components(graph: ProjectionGraph, edge_filter: str = "positive_only") -> ComponentReport:
    """Connected components over the selected edge set; isolated nodes count.

    Components are ordered by size descending, then by smallest member id;
    members are sorted lexicographically.
    """
    if edge_filter not in ("positive_only", "all"):
        raise ValidationError(f"unknown edge filter {edge_filter!r}")
    if edge_filter == "positive_only":
        us, vs = graph.edge_index_arrays("positive")
    else:
        us = [graph.node_index(e.u) for e in graph.edges]
        vs = [graph.node_index(e.v) for e in graph.edges]
    comps = _grouped_components(graph.n_nodes, graph.nodes, us, vs)
    n = graph.n_nodes
    giant = Fraction(len(comps[0]), n) if comps else Fraction(0)
    return ComponentReport(components=comps, giant_fraction=giant, n_nodes=n)


@dataclass
class ThresholdSelection:
    """Result of the descending weight-level sweep."""

    chosen_threshold: Fraction
    giant_fraction_at_chosen: Fraction
    sweep: list
    target_fraction: Fraction

    def to_dict(self) -> dict:
        return {
            "chosen_threshold": format_fraction(self.chosen_threshold),
            "giant_fraction_at_chosen": format_fraction(self.giant_fraction_at_chosen),
            "target_fraction": format_fraction(self.target_fraction),
            "sweep": [
                {
                    "threshold": format_fraction(level),
                    "giant_fraction": format_fraction(frac),
                    "giant_fraction_decimal": float(frac),
                }
                for level, frac in self.sweep
            ],
        }


def select_threshold(weights: PairWeights, target_fraction=Fraction(1, 2), *,
                     min_level=None, block_rows: int = DEFAULT_BLOCK_ROWS,
                     pair_budget: int = DEFAULT_PAIR_BUDGET) -> ThresholdSelection:
    """Highest weight level whose edge set reaches the target giant component.

    Descends through the distinct weight values present, adding all edges at
    each level, and stops at the first (hence highest) level where the largest
    component covers at least target_fraction of the participants. Levels are
    distinct values, so ties cannot occur. min_level bounds the descent; if
    the target is never reached the sweep so far is raised with the error.
    """
    target = as_fraction(target_fraction)
    if not (0 < target <= 1):
        raise ValidationError(f"target fraction {target} must lie in (0, 1]")
    if weights.rescale:
        raise ValidationError("automatic threshold selection is not supported for "
                              "rescaled pairwise weights")
    n = weights.n_participants
    d = weights.denominator
    off = weights.numerator_offset

    hist = weights.level_histogram(block_rows=block_rows)
    present = np.nonzero(hist)[0]
    numerators = (present - off)[::-1].astype(np.int64)  # descending weight levels
    counts = hist[present][::-1]
    if min_level is not None:
        floor = as_fraction(min_level)
        keep = numerators * floor.denominator >= floor.numerator * d
        numerators = numerators[keep]
        counts = counts[keep]

    uf = UnionFind(n)
    sweep: list[tuple[Fraction, Fraction]] = []

    def reached() -> bool:
        return uf.largest * target.denominator >= target.numerator * n

    idx = 0
    while idx < len(numerators):
        # batch as many levels as fit the pair budget; a single oversized
        # level is streamed without materializing its pairs
        batch_end = idx
        total = 0
        while batch_end < len(numerators) and (batch_end == idx or total + counts[batch_end] <= pair_budget):
            total += counts[batch_end]
            batch_end += 1
        lo = int(numerators[batch_end - 1])
        hi = int(numerators[idx])
        if batch_end == idx + 1 and counts[idx] > pair_budget:
            # oversized single level: union streaming, never materialized
            for _, ii, jj in weights.collect_pairs_in_range(lo, hi, block_rows):
                for a, b in zip(ii.tolist(), jj.tolist()):
                    uf.union(a, b)
            level = Fraction(int(numerators[idx]), d)
            frac = Fraction(uf.largest, n)
            sweep.append((level, frac))
            if reached():
                return ThresholdSelection(level, frac, sweep, target)
            idx = batch_end
            continue
        chunks = list(weights.collect_pairs_in_range(lo, hi, block_rows))
        if chunks:
            vals = np.concatenate([c[0] for c in chunks])
            iis = np.concatenate([c[1] for c in chunks])
            jjs = np.concatenate([c[2] for c in chunks])
        else:
            vals = iis = jjs = np.empty(0, dtype=np.int64)
        order = np.argsort(-vals, kind="stable")
        vals, iis, jjs = vals[order], iis[order], jjs[order]
        neg_sorted = -vals
        for pos in range(idx, batch_end):
            level_numer = int(numerators[pos])
            a = int(np.searchsorted(neg_sorted, -level_numer, side="left"))
            b = int(np.searchsorted(neg_sorted, -level_numer, side="right"))
            for x, y in zip(iis[a:b].tolist(), jjs[a:b].tolist()):
                uf.union(x, y)
            level = Fraction(level_numer, d)
            frac = Fraction(uf.largest, n)
            sweep.append((level, frac))
            if reached():
                return ThresholdSelection(level, frac, sweep, target)
        idx = batch_end

    raise NoGiantComponentError(
        f"no weight level reached a giant component of {format_fraction(target)} "
        f"of the {n} participants",
        sweep,
    )


def _betweenness_fast(n_nodes: int, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Float64 edge betweenness over unweighted shortest paths (Brandes).

    Level-synchronous BFS vectorized over the directed edge arrays; all
    accumulation happens in a fixed order, so results are run-to-run
    identical.
    """
    n_edges = len(us)
    bet = np.zeros(n_edges)
    if n_edges == 0 or n_nodes == 0:
        return bet
    src = np.concatenate([us, vs]).astype(np.int64)
    dst = np.concatenate([vs, us]).astype(np.int64)
    eid = np.concatenate([np.arange(n_edges), np.arange(n_edges)])
    for s in range(n_nodes):
        dist = np.full(n_nodes, -1, dtype=np.int64)
        sigma = np.zeros(n_nodes)
        dist[s] = 0
        sigma[s] = 1.0
        depth = 0
        while True:
            on = dist[src] == depth
            if not on.any():
                break
            tails = dst[on]
            fresh = tails[dist[tails] < 0]
            if fresh.size:
                dist[fresh] = depth + 1
            dag_local = dist[tails] == depth + 1
            if dag_local.any():
                sigma += np.bincount(tails[dag_local],
                                     weights=sigma[src[on][dag_local]],
                                     minlength=n_nodes)
            depth += 1
        max_depth = depth - 1
        if max_depth < 1:
            continue
        delta = np.zeros(n_nodes)
        dsrc = dist[src]
        ddst = dist[dst]
        dag = (dsrc >= 0) & (ddst == dsrc + 1)
        for level in range(max_depth, 0, -1):
            m = dag & (ddst == level)
            if not m.any():
                continue
            u = src[m]
            w = dst[m]
            contrib = sigma[u] / sigma[w] * (1.0 + delta[w])
            bet += np.bincount(eid[m], weights=contrib, minlength=n_edges)
            delta += np.bincount(u, weights=contrib, minlength=n_nodes)
    return bet / 2.0


def _betweenness_exact(n_nodes: int, us, vs) -> list:
    """Fraction-valued edge betweenness (pure-Python Brandes)."""
    n_edges = len(us)
    adjacency: list[list] = [[] for _ in range(n_nodes)]
    for e, (a, b) in enumerate(zip(us, vs)):
        adjacency[int(a)].append((int(b), e))
        adjacency[int(b)].append((int(a), e))
    bet = [Fraction(0)] * n_edges
    for s in range(n_nodes):
        dist = [-1] * n_nodes
        sigma = [0] * n_nodes
        preds: list[list] = [[] for _ in range(n_nodes)]
        order = []
        dist[s] = 0
        sigma[s] = 1
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w, e in adjacency[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append((v, e))
        delta = [Fraction(0)] * n_nodes
        for w in reversed(order):
            dw = delta[w]
            for v, e in preds[w]:
                contrib = Fraction(sigma[v], sigma[w]) * (1 + dw)
                bet[e] += contrib
                delta[v] += contrib
    return [b / 2 for b in bet]


def edge_betweenness(graph: ProjectionGraph, *, exact: bool = False) -> dict:
    """Edge betweenness of the positive subgraph, keyed by (u, v).

    Each unordered node pair contributes once, split equally among its
    shortest paths. Float64 by default; exact=True returns Fractions.
    """
    us, vs = graph.edge_index_arrays("positive")
    if exact:
        values = _betweenness_exact(graph.n_nodes, us, vs)
    else:
        values = _betweenness_fast(graph.n_nodes, us, vs)
    out = {}
    for e, value in zip(graph.positive_edges(), values):
        out[(e.u, e.v)] = value if exact else float(value)
    return out


@dataclass
class RemovalStep:
    edge: tuple
    betweenness: float
    component_sizes: list

    def to_dict(self) -> dict:
        return {
            "edge": list(self.edge),
            "betweenness": self.betweenness,
            "component_sizes": self.component_sizes,
        }


@dataclass
class CommunityReport:
    """Outcome of iterative highest-betweenness edge removal."""

    removed_edges: list
    removed_fraction: Fraction
    final_components: list
    history: list = field(default_factory=list)
    status: str = "split"
    original_edge_count: int = 0

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "original_edge_count": self.original_edge_count,
            "removed_count": len(self.removed_edges),
            "removed_fraction": format_fraction(self.removed_fraction),
            "removed_fraction_decimal": float(self.removed_fraction),
            "removed_edges": [list(e) for e in self.removed_edges],
            "component_sizes": [len(c) for c in self.final_components],
            "final_components": [list(c) for c in self.final_components],
            "history": [h.to_dict() for h in self.history],
        }


def girvan_newman(graph: ProjectionGraph, target_components: int = 2,
                  max_removed_fraction=Fraction(1)) -> CommunityReport:
    """Split the positive subgraph by repeated highest-betweenness removal.

    Each iteration recomputes betweenness on the current graph and removes
    the single highest-betweenness edge; ties break to the lexicographically
    smallest (u, v). Stops once the component count reaches the target or the
    removal budget (a fraction of the original edge count) is exhausted, in
    which case the partial history is returned with status budget_exhausted.
    """
    if target_components < 1:
        raise ValidationError("target component count must be at least 1")
    budget_fraction = as_fraction(max_removed_fraction)
    if not (0 <= budget_fraction <= 1):
        raise ValidationError("max removed fraction must lie in [0, 1]")

    pos_edges = graph.positive_edges()  # canonical (u, v) order
    n = graph.n_nodes
    edge_ids = [(e.u, e.v) for e in pos_edges]
    us = np.array([graph.node_index(u) for u, _ in edge_ids], dtype=np.int64)
    vs = np.array([graph.node_index(v) for _, v in edge_ids], dtype=np.int64)
    original_count = len(edge_ids)

    comps = _grouped_components(n, graph.nodes, us, vs)
    if len(comps) >= target_components:
        return CommunityReport(
            removed_edges=[],
            removed_fraction=Fraction(0),
            final_components=comps,
            history=[],
            status="already_satisfied",
            original_edge_count=original_count,
        )

    budget = (budget_fraction.numerator * original_count) // budget_fraction.denominator
    removed: list[tuple] = []
    history: list[RemovalStep] = []
    status = "budget_exhausted"
    while len(removed) < budget:
        bet = _betweenness_fast(n, us, vs)
        k = int(np.argmax(bet))  # first max = lexicographically smallest edge
        removed.append(edge_ids[k])
        value = float(bet[k])
        del edge_ids[k]
        us = np.delete(us, k)
        vs = np.delete(vs, k)
        comps = _grouped_components(n, graph.nodes, us, vs)
        history.append(RemovalStep(removed[-1], value, [len(c) for c in comps]))
        if len(comps) >= target_components:
            status = "split"
            break

    fraction = Fraction(len(removed), original_count) if original_count else Fraction(0)
    return CommunityReport(
        removed_edges=removed,
        removed_fraction=fraction,
        final_components=comps,
        history=history,
        status=status,
        original_edge_count=original_count,
    )


_SIGN_CHARS = {-1: "-", 0: "0", 1: "+"}


@dataclass
class ProfileCensus:
    """Tally of distinct sign profiles against the space of possible ones."""

    m_binary: int
    n_participants: int
    profiles: dict
    has_neutral_or_missing: bool

    @property
    def realized_profiles(self) -> int:
        return len(self.profiles)

    @property
    def fraction_of_binary_space(self) -> Fraction:
        return Fraction(self.realized_profiles, 2**self.m_binary)

    @property
    def fraction_of_ternary_space(self) -> Fraction:
        return Fraction(self.realized_profiles, 3**self.m_binary)

    @property
    def realized_fraction(self) -> Fraction:
        """Against 2^m when every profile is strictly +/-, else against 3^m."""
        if self.has_neutral_or_missing:
            return self.fraction_of_ternary_space
        return self.fraction_of_binary_space

    def to_dict(self) -> dict:
        return {
            "m_binary": self.m_binary,
            "n_participants": self.n_participants,
            "realized_profiles": self.realized_profiles,
            "has_neutral_or_missing": self.has_neutral_or_missing,
            "realized_fraction": format_fraction(self.realized_fraction),
            "realized_fraction_decimal": float(self.realized_fraction),
            "fraction_of_binary_space": format_fraction(self.fraction_of_binary_space),
            "fraction_of_ternary_space": format_fraction(self.fraction_of_ternary_space),
            "profiles": {k: self.profiles[k] for k in sorted(self.profiles)},
        }


def profile_census(signs: SignMatrix) -> ProfileCensus:
    """Count each distinct full sign profile ('+', '-', '0', '?' for missing)."""
    lut = np.array([ord("-"), ord("0"), ord("+")], dtype=np.uint8)
    chars = lut[signs.signs.astype(np.int64) + 1].astype(np.uint8)
    chars[~signs.mask] = ord("?")
    counts: dict[str, int] = {}
    for row in chars:
        profile = row.tobytes().decode("ascii")
        counts[profile] = counts.get(profile, 0) + 1
    neutral_or_missing = bool(((signs.signs == 0) & signs.mask).any() or signs.has_missing)
    return ProfileCensus(
        m_binary=signs.n_items,
        n_participants=signs.n_participants,
        profiles=counts,
        has_neutral_or_missing=neutral_or_missing,
    )
