import itertools
import random
from fractions import Fraction

import pytest

from opinionnet import (
    Edge,
    ProjectionGraph,
    ValidationError,
    exact_agreement_weights,
    project_attitudes,
    project_participants,
    renormalize,
    score_weights,
    style_edges,
    thirds_style,
)

from helpers import make_matrix, weights_from_rows
from oracles import all_pair_weights, random_rows


def F(*args):
    return Fraction(*args)


# ---------------------------------------------------------------------------
# exact agreement
# ---------------------------------------------------------------------------


def test_exact_identical_rows_reach_item_count():
    row = [1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 4, 4, 4]
    ks = [4] * 10 + [5] * 3
    w = weights_from_rows([row, list(row)], ks, "exact_agreement")
    assert w.weight(0, 1) == 13


def test_exact_counts_equal_coordinates():
    w = weights_from_rows([[1, 2, 3], [1, 2, 4]], [5, 5, 5], "exact_agreement")
    assert w.weight(0, 1) == 2


def test_exact_minimal_link_weight_one():
    w = weights_from_rows([[0, 0, 0], [0, 1, 1]], [4, 4, 4], "exact_agreement")
    assert w.weight(0, 1) == 1


def test_exact_requires_two_participants():
    with pytest.raises(ValidationError, match="at least 2"):
        exact_agreement_weights(make_matrix([[1]], [4]))


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------


def test_score_identical_rows_reach_plus_m():
    ks = [4] * 10 + [5] * 3
    row = [0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 0, 2, 4]
    w = weights_from_rows([row, list(row)], ks, "score")
    assert w.weight(0, 1) == 13


def test_score_opposite_extremes_reach_minus_m():
    ks = [4] * 10 + [5] * 3
    low = [0] * 13
    high = [k - 1 for k in ks]
    w = weights_from_rows([low, high], ks, "score")
    assert w.weight(0, 1) == -13


def test_score_direct_arithmetic():
    # two 5-point items: (-1, 1/2) vs (-1/2, 1/2) differ by 1/2 in total
    w = weights_from_rows([[0, 3], [1, 3]], [5, 5], "score")
    assert w.weight(0, 1) == F(3, 2)


def test_score_minimum_needs_extremes_on_every_item():
    # one non-extreme answer caps the per-item difference below 2
    ks = [5] * 4
    w = weights_from_rows([[0, 0, 0, 1], [4, 4, 4, 4]], ks, "score")
    assert w.weight(0, 1) > -4
    w2 = weights_from_rows([[0, 0, 0, 0], [4, 4, 4, 4]], ks, "score")
    assert w2.weight(0, 1) == -4


# ---------------------------------------------------------------------------
# binarized agreement
# ---------------------------------------------------------------------------


def test_binarized_counts_equal_signs():
    # signs (+1,+1,-1) vs (+1,+1,+1) -> 2
    w = weights_from_rows([[1, 1, 0], [1, 1, 1]], [2, 2, 2], "binarized_agreement")
    assert w.weight(0, 1) == 2


def test_binarized_same_side_codes_agree():
    # 4-point codes 3 and 2 normalize to 1 and 1/3: both positive
    w = weights_from_rows([[3], [2]], [4], "binarized_agreement")
    assert w.weight(0, 1) == 1


def test_binarized_neutral_pair_rule_and_its_flip():
    # signs (0,+1) vs (0,-1): both-neutral counts as agreement by default
    rows = [[1, 2], [1, 0]]
    ks = [3, 3]
    w = weights_from_rows(rows, ks, "binarized_agreement")
    assert w.weight(0, 1) == 1
    # flipping the rule must flip the oracle the same way
    w_off = weights_from_rows(rows, ks, "binarized_agreement", count_neutral_pairs=False)
    assert w_off.weight(0, 1) == 0
    oracle_on = all_pair_weights(rows, ks, "binarized_agreement", True)[(0, 1)][0]
    oracle_off = all_pair_weights(rows, ks, "binarized_agreement", False)[(0, 1)][0]
    assert w.weight(0, 1) == oracle_on
    assert w_off.weight(0, 1) == oracle_off


# ---------------------------------------------------------------------------
# weight invariants
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("mode", ["exact_agreement", "score", "binarized_agreement"])
def test_symmetry_by_full_enumeration(mode):
    rng = random.Random(17)
    ks = [2, 3, 4, 5, 5]
    rows = random_rows(rng, 30, ks, missing_rate=0.1)
    w = weights_from_rows(rows, ks, mode)
    for i in range(30):
        for j in range(i + 1, 30):
            assert w.weight(i, j) == w.weight(j, i)


@pytest.mark.parametrize("mode", ["exact_agreement", "score", "binarized_agreement"])
def test_weights_match_oracle(mode):
    rng = random.Random(23)
    for missing_rate in (0.0, 0.2):
        ks = [rng.randrange(2, 8) for _ in range(rng.randrange(2, 8))]
        rows = random_rows(rng, 18, ks, missing_rate=missing_rate)
        w = weights_from_rows(rows, ks, mode)
        oracle = all_pair_weights(rows, ks, mode)
        for (i, j), (expected, co) in oracle.items():
            assert w.weight(i, j) == expected
            assert w.co_answered(i, j) == co


def test_weight_ranges():
    rng = random.Random(31)
    ks = [4, 5, 6]
    rows = random_rows(rng, 20, ks, missing_rate=0.15)
    m = len(ks)
    for mode in ("exact_agreement", "score", "binarized_agreement"):
        w = weights_from_rows(rows, ks, mode)
        for i in range(20):
            for j in range(i + 1, 20):
                value = w.weight(i, j)
                if mode == "score":
                    assert -m <= value <= m
                else:
                    assert 0 <= value <= m


def test_dominance_full_score_iff_identical_iff_full_agreement():
    rng = random.Random(41)
    ks = [4, 4, 5, 3]
    rows = random_rows(rng, 12, ks)
    rows.append(list(rows[0]))  # force one identical pair
    ws = weights_from_rows(rows, ks, "score")
    we = weights_from_rows(rows, ks, "exact_agreement")
    m = len(ks)
    n = len(rows)
    for i in range(n):
        for j in range(i + 1, n):
            assert (ws.weight(i, j) == m) == (we.weight(i, j) == m)
            assert (ws.weight(i, j) == m) == (rows[i] == rows[j])


def test_adjacent_codes_stay_linked_under_scoring():
    # one 4-point item one step apart: exact agreement drops to m-1 while the
    # score only drops to m - 2/3, so a threshold of m-1 keeps the pair linked
    ks = [4] * 13
    base = [2] * 13
    near = list(base)
    near[4] = 3
    m = len(ks)
    we = weights_from_rows([base, near], ks, "exact_agreement")
    ws = weights_from_rows([base, near], ks, "score")
    assert we.weight(0, 1) == m - 1
    assert ws.weight(0, 1) == m - F(2, 3)
    graph = project_participants(ws, m - 1)
    assert len(graph.positive_edges()) == 1


def test_relabeling_invariance():
    rng = random.Random(59)
    ks = [4, 4, 5]
    rows = random_rows(rng, 15, ks)
    ids = [f"p{i:02d}" for i in range(15)]
    perm = list(range(15))
    rng.shuffle(perm)
    a = make_matrix(rows, ks, ids=ids)
    b = make_matrix([rows[p] for p in perm], ks, ids=[ids[p] for p in perm])
    ga = project_participants(score_weights(renormalize(a)), F(1))
    gb = project_participants(score_weights(renormalize(b)), F(1))
    edges_a = {(e.u, e.v, e.weight) for e in ga.edges}
    edges_b = {(e.u, e.v, e.weight) for e in gb.edges}
    assert edges_a == edges_b
    assert set(ga.nodes) == set(gb.nodes)


def test_exact_agreement_never_exceeds_binarized():
    # identical codes imply identical signs, so the binarized count dominates
    rng = random.Random(103)
    ks = [3, 4, 5, 7]
    rows = random_rows(rng, 20, ks, missing_rate=0.1)
    we = weights_from_rows(rows, ks, "exact_agreement")
    wb = weights_from_rows(rows, ks, "binarized_agreement")
    for i in range(20):
        for j in range(i + 1, 20):
            assert we.weight(i, j) <= wb.weight(i, j)


def test_threshold_monotonicity():
    rng = random.Random(61)
    ks = [4, 5, 4, 5]
    rows = random_rows(rng, 25, ks)
    w = weights_from_rows(rows, ks, "score")
    thresholds = [F(-4), F(-1), F(0), F(1, 2), F(2), F(3), F(4)]
    previous = None
    for theta in reversed(thresholds):  # descending theta: edge sets grow
        edges = {(e.u, e.v) for e in project_participants(w, theta).edges}
        if previous is not None:
            assert previous <= edges
        previous = edges


# ---------------------------------------------------------------------------
# projection thresholds
# ---------------------------------------------------------------------------


def test_projection_at_m_minus_one_exact_agreement():
    rows = [
        [0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],  # one item away
        [1, 1, 1, 1, 0, 0, 0, 0],  # four items away
    ]
    ks = [3] * 8
    w = weights_from_rows(rows, ks, "exact_agreement")
    graph = project_participants(w, len(ks) - 1)
    assert {(e.u, e.v) for e in graph.edges} == {("p000", "p001")}
    assert graph.threshold_used == 7


def test_projection_at_plus_m_links_identical_only():
    ks = [4] * 13
    rows = [[1] * 13, [1] * 13, [1] * 12 + [2]]
    w = weights_from_rows(rows, ks, "score")
    graph = project_participants(w, 13)
    assert [(e.u, e.v) for e in graph.edges] == [("p000", "p001")]


def test_threshold_11_5_means_total_difference_at_most_1_5():
    ks = [5] * 13
    base = [2] * 13
    delta3 = list(base)
    delta3[0] = 3
    delta3[1] = 3
    delta3[2] = 3  # three half-steps: diff 3/2, score 23/2
    delta4 = list(base)
    for j in range(4, 8):
        delta4[j] = 3  # four half-steps: diff 2, score 11
    w = weights_from_rows([base, delta3, delta4], ks, "score")
    assert w.weight(0, 1) == F(23, 2)
    assert w.weight(0, 2) == 11
    assert w.weight(1, 2) == F(19, 2)
    graph = project_participants(w, "11.5")
    assert {(e.u, e.v) for e in graph.edges} == {("p000", "p001")}
    fraction_graph = project_participants(w, "23/2")
    assert {(e.u, e.v) for e in fraction_graph.edges} == {("p000", "p001")}


def test_negative_threshold_adds_disagreement_edges():
    ks = [5] * 13
    rows = [[0] * 13, [0] * 13, [4] * 13]
    w = weights_from_rows(rows, ks, "score")
    graph = project_participants(w, 13, negative_threshold=-3)
    positives = {(e.u, e.v) for e in graph.positive_edges()}
    negatives = {(e.u, e.v) for e in graph.negative_edges()}
    assert positives == {("p000", "p001")}
    assert negatives == {("p000", "p002"), ("p001", "p002")}
    for e in graph.negative_edges():
        assert e.weight <= -3


def test_isolated_nodes_retained():
    ks = [4] * 5
    rows = [[0] * 5, [0] * 5, [3] * 5]
    w = weights_from_rows(rows, ks, "exact_agreement")
    graph = project_participants(w, 5)
    assert graph.n_nodes == 3
    assert {(e.u, e.v) for e in graph.edges} == {("p000", "p001")}


def test_threshold_validation():
    w = weights_from_rows([[0, 0], [1, 1]], [4, 4], "score")
    with pytest.raises(ValidationError, match="outside representable range"):
        project_participants(w, 3)
    with pytest.raises(ValidationError, match="outside representable range"):
        project_participants(w, -3)
    with pytest.raises(ValidationError, match="strictly below"):
        project_participants(w, 0, negative_threshold=0)
    with pytest.raises(ValidationError, match="outside representable range"):
        project_participants(w, 1, negative_threshold=-5)


def test_node_attributes_flow_to_graph():
    mx = make_matrix([[0], [1]], [4], attributes={"party": ["D", "R"]})
    w = exact_agreement_weights(mx)
    graph = project_participants(w, 0, node_attrs=mx.node_attributes())
    assert graph.node_attrs["p000"] == {"party": "D"}
    assert graph.node_attrs["p001"] == {"party": "R"}


def test_bucketed_projection_matches_scan():
    rng = random.Random(71)
    ks = [3] * 6
    rows = [random.Random(i % 9).choices(range(3), k=6) for i in range(60)]
    rows += [list(rows[0]), list(rows[1])]
    w = weights_from_rows(rows, ks, "exact_agreement")
    for threshold in (6, 5):
        fast = project_participants(w, threshold, use_bucketing=True)
        slow = project_participants(w, threshold, use_bucketing=False)
        assert [(e.u, e.v, e.weight) for e in fast.edges] == [
            (e.u, e.v, e.weight) for e in slow.edges
        ]


def test_bucketing_rejected_when_inapplicable():
    w = weights_from_rows([[0, 0], [1, 1]], [4, 4], "score")
    with pytest.raises(ValidationError, match="bucketed projection"):
        project_participants(w, 1, use_bucketing=True)


def test_thread_count_does_not_change_output():
    rng = random.Random(83)
    ks = [4, 5, 4]
    rows = random_rows(rng, 40, ks)
    w = weights_from_rows(rows, ks, "score")
    one = project_participants(w, F(1), threads=1, block_rows=7)
    four = project_participants(w, F(1), threads=4, block_rows=7)
    assert [(e.u, e.v, e.weight) for e in one.edges] == [(e.u, e.v, e.weight) for e in four.edges]


def test_block_size_does_not_change_output():
    rng = random.Random(89)
    ks = [4, 4, 5, 3]
    rows = random_rows(rng, 33, ks, missing_rate=0.1)
    w = weights_from_rows(rows, ks, "score")
    default = project_participants(w, F(1, 3), negative_threshold=F(-2))
    tiny = project_participants(w, F(1, 3), negative_threshold=F(-2), block_rows=2)
    assert default.edges == tiny.edges


def test_pairwise_missing_score_uses_co_answered():
    ks = [5, 5, 5]
    rows = [[0, None, 4], [0, 2, None]]
    w = weights_from_rows(rows, ks, "score")
    # only item 0 is co-answered: weight = 1 - 0 = 1
    assert w.co_answered(0, 1) == 1
    assert w.weight(0, 1) == 1


def test_rescaled_pairwise_score():
    ks = [5, 5, 5, 5]
    rows = [[0, 0, None, 4], [0, 4, 2, None]]
    w = weights_from_rows(rows, ks, "score", rescale=True)
    # co = 2, raw = 2 - 2 = 0 -> rescaled 4 * 0 / 2 = 0
    assert w.weight(0, 1) == 0
    rows2 = [[0, 0, 0, None], [0, 0, 4, None]]
    w2 = weights_from_rows(rows2, ks, "score", rescale=True)
    # co = 3, raw = 3 - 2 = 1 -> rescaled 4/3
    assert w2.weight(0, 1) == F(4, 3)
    graph = project_participants(w2, F(4, 3))
    assert len(graph.edges) == 1


def test_rescale_is_identity_on_complete_data():
    rng = random.Random(101)
    ks = [4, 5, 3]
    rows = random_rows(rng, 12, ks)
    plain = weights_from_rows(rows, ks, "score")
    rescaled = weights_from_rows(rows, ks, "score", rescale=True)
    for i in range(12):
        for j in range(i + 1, 12):
            assert plain.weight(i, j) == rescaled.weight(i, j)
    ga = project_participants(plain, F(1, 2))
    gb = project_participants(rescaled, F(1, 2))
    assert [(e.u, e.v, e.weight) for e in ga.edges] == [(e.u, e.v, e.weight) for e in gb.edges]


def test_no_co_answered_items_scores_zero():
    ks = [4, 4]
    rows = [[0, None], [None, 1]]
    w = weights_from_rows(rows, ks, "score")
    assert w.co_answered(0, 1) == 0
    assert w.weight(0, 1) == 0


# ---------------------------------------------------------------------------
# attitude projection and styling
# ---------------------------------------------------------------------------


def test_attitude_counts_by_definition():
    # values (+1,+1), (+1,-1), (-1,-1) on two items
    ag = project_attitudes(renormalize(make_matrix([[1, 1], [1, 0], [0, 0]], [2, 2])))
    pos, neg = ag.count("q00", "q01")
    assert (pos, neg) == (1, 1)


def test_attitude_all_positive_is_top_third_solid():
    n = 9
    ag = project_attitudes(renormalize(make_matrix([[1, 1]] * n, [2, 2])))
    pos, neg = ag.count("q00", "q01")
    assert pos == n and neg == 0
    graph = style_edges(ag)
    assert len(graph.edges) == 1
    edge = graph.edges[0]
    assert edge.sign == "positive"
    assert edge.style == "solid"
    assert edge.weight == n


def test_attitude_neutral_and_missing_count_for_neither():
    rows = [[2, 4], [None, 4], [4, 4]]
    ag = project_attitudes(renormalize(make_matrix(rows, [5, 5])))
    pos, neg = ag.count("q00", "q01")
    assert (pos, neg) == (1, 0)


def test_attitude_pos_plus_neg_bounded_by_n():
    rng = random.Random(97)
    ks = [5, 4, 3, 5]
    rows = random_rows(rng, 50, ks, missing_rate=0.1)
    ag = project_attitudes(renormalize(make_matrix(rows, ks)))
    for a, b in itertools.combinations(sorted(ag.items), 2):
        pos, neg = ag.count(a, b)
        assert 0 <= pos <= 50
        assert 0 <= neg <= 50
        assert pos + neg <= 50


def test_attitude_needs_two_items():
    with pytest.raises(ValidationError, match="at least 2 items"):
        project_attitudes(renormalize(make_matrix([[1], [0]], [4])))


def test_thirds_boundaries_exact():
    n = 6
    assert thirds_style(0, n) is None
    assert thirds_style(1, n) == "dotted"
    assert thirds_style(2, n) == "dotted"  # exactly N/3
    assert thirds_style(3, n) == "dashed"
    assert thirds_style(4, n) == "dashed"  # exactly 2N/3
    assert thirds_style(5, n) == "solid"
    assert thirds_style(6, n) == "solid"
    # non-divisible total: boundaries stay exact rationals
    assert thirds_style(2, 7) == "dotted"  # 6 <= 7
    assert thirds_style(3, 7) == "dashed"  # 9 > 7, 9 <= 14
    assert thirds_style(5, 7) == "solid"  # 15 > 14


def test_styled_attitude_graph_dual_edges():
    rows = [[1, 1], [1, 1], [0, 0]]
    graph = style_edges(project_attitudes(renormalize(make_matrix(rows, [2, 2]))))
    signs = {(e.sign, e.weight, e.style) for e in graph.edges}
    assert signs == {("positive", F(2), "dashed"), ("negative", F(-1), "dotted")}
    assert graph.extra["n_participants"] == 3


def test_styled_attitude_negative_full_is_solid_red():
    rows = [[0, 0]] * 5
    graph = style_edges(project_attitudes(renormalize(make_matrix(rows, [2, 2]))))
    assert [(e.sign, e.style) for e in graph.edges] == [("negative", "solid")]
    assert graph.edges[0].weight == -5


def test_zero_count_pairs_get_no_edge():
    rows = [[1, 1], [0, 1]]  # no co-negative pair on (q00, q01)
    graph = style_edges(project_attitudes(renormalize(make_matrix(rows, [2, 2]))))
    assert [(e.sign,) for e in graph.edges] == [("positive",)]


def test_attitude_signed_mode_single_edge():
    rows = [[1, 1], [1, 1], [0, 0]]
    graph = style_edges(project_attitudes(renormalize(make_matrix(rows, [2, 2]))), mode="signed")
    assert len(graph.edges) == 1
    edge = graph.edges[0]
    assert edge.weight == 1  # 2 positive - 1 negative
    assert edge.sign == "positive"


def test_restyle_participant_graph_by_weight_thirds():
    ks = [4] * 6
    rows = [[0] * 6, [0] * 6, [0, 0, 0, 0, 1, 1], [1, 1, 1, 1, 1, 1]]
    w = weights_from_rows(rows, ks, "exact_agreement")
    graph = project_participants(w, 2)
    styled = style_edges(graph)
    by_pair = {(e.u, e.v): e.style for e in styled.edges}
    assert by_pair[("p000", "p001")] == "solid"  # weight 6 of 6
    assert by_pair[("p000", "p002")] == "dashed"  # weight 4 of 6
    assert by_pair[("p002", "p003")] == "dotted"  # weight 2 of 6


# ---------------------------------------------------------------------------
# ProjectionGraph container semantics
# ---------------------------------------------------------------------------


def test_graph_canonicalizes_edges():
    graph = ProjectionGraph(
        kind="participant",
        nodes=["b", "a", "c"],
        edges=[Edge("c", "a", F(2)), Edge("b", "a", F(1))],
    )
    assert [(e.u, e.v) for e in graph.edges] == [("a", "b"), ("a", "c")]


def test_graph_rejects_duplicates_self_loops_unknown_nodes():
    with pytest.raises(ValidationError, match="duplicate"):
        ProjectionGraph("participant", ["a", "b"], [Edge("a", "b", F(1)), Edge("b", "a", F(2))])
    with pytest.raises(ValidationError, match="self-loop"):
        ProjectionGraph("participant", ["a"], [Edge("a", "a", F(1))])
    with pytest.raises(ValidationError, match="unknown node"):
        ProjectionGraph("participant", ["a"], [Edge("a", "z", F(1))])
    with pytest.raises(ValidationError, match="unique"):
        ProjectionGraph("participant", ["a", "a"], [])


def test_graph_enforces_threshold_invariants():
    with pytest.raises(ValidationError, match="below the threshold"):
        ProjectionGraph("participant", ["a", "b"], [Edge("a", "b", F(1))],
                        threshold_used=F(2))
    with pytest.raises(ValidationError, match="above the negative threshold"):
        ProjectionGraph("participant", ["a", "b"], [Edge("a", "b", F(-1), "negative")],
                        threshold_used=F(2), negative_threshold_used=F(-3))
    # without declared thresholds no constraint applies
    ProjectionGraph("participant", ["a", "b"], [Edge("a", "b", F(-1), "negative")])


def test_attitude_graph_may_carry_both_signs_per_pair():
    graph = ProjectionGraph(
        kind="attitude",
        nodes=["x", "y"],
        edges=[Edge("x", "y", F(3), "positive"), Edge("x", "y", F(-2), "negative")],
        extra={"n_participants": 5},
    )
    assert len(graph.edges) == 2
