import itertools
import random

import pytest

from combdyn.errors import DomainError, ValidationError
from combdyn.markov import SignedMatrix, markov_matrix, mat_pow, om_of, trace
from combdyn.orders import basic_forced
from combdyn.permutation import Permutation, enumerate_cycles, power
from combdyn.trees import (
    GraphVertexMap,
    Tree,
    TreeVertexMap,
    _occurrence_matrices,
    dot_certificate,
    nine_vertex_example,
    graph_matrices,
    iterate_routes,
    path_tree,
    random_derangement,
    random_tree,
    reduce_route,
    reduced_path,
    tree_graph,
    tree_matrices,
    tree_trace_check,
    tree_walk_witnesses,
)
from combdyn.walks import closed_walk_classes, is_repetitive

from oracles import tree_path_edges

FIG11 = {(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 1), (3, 2), (7, 4), (1, 1)}


def random_single_orbit(v, rng):
    t = random_tree(v, rng)
    rest = list(range(2, v + 1))
    rng.shuffle(rest)
    return TreeVertexMap(t, Permutation.from_cycles([[1] + rest], v))


def test_tree_validation():
    with pytest.raises(ValidationError):
        Tree(3, ((1, 2),))
    with pytest.raises(ValidationError):
        Tree(4, ((1, 2), (2, 1), (3, 4)))
    with pytest.raises(DomainError):
        Tree(1, ())


def test_edge_count_identity():
    rng = random.Random(1)
    for _ in range(50):
        t = random_tree(rng.randint(2, 12), rng)
        assert t.e - t.v == -1


def test_nine_vertex_markov_graph():
    tvm = nine_vertex_example()
    g = tree_graph(tvm)
    assert {(e.source, e.target) for e in g.edges} == FIG11
    assert len(g.edges) == 11
    loop = [e for e in g.edges if e.source == e.target]
    assert [e.sign for e in loop] == [-1]


def test_nine_vertex_no_six_walks():
    g = tree_graph(nine_vertex_example())
    assert closed_walk_classes(g, 6, nonrepetitive_only=True) == set()
    # only repetitions of the E1 loop and of E2E3E2 close up at length 6
    assert {c[0] for c in closed_walk_classes(g, 6)} == {(1,) * 6, (2, 3) * 3}
    assert tree_walk_witnesses(nine_vertex_example(), 6) is None


def test_nine_vertex_witnesses():
    tvm = nine_vertex_example()
    w1 = tree_walk_witnesses(tvm, 1)
    assert w1.vertices == (1, 1) and w1.sign == -1
    w8 = tree_walk_witnesses(tvm, 8)
    assert w8.length == 8 and w8.sign == -1 and not is_repetitive(w8)


def test_nine_vertex_trace_and_dots():
    tvm = nine_vertex_example()
    assert tree_trace_check(tvm) == -1
    dots = dot_certificate(tvm)
    assert sum(dots) == 9
    _, om = tree_matrices(tvm)
    assert dots == [1 - om[i, i] for i in range(8)]


def test_reduced_path_examples():
    t = nine_vertex_example().tree
    p = reduced_path(t, 2, 3)
    assert [abs(x) for x in p] == [1, 2]
    assert reduced_path(t, 5, 5) == ()
    assert reduced_path(t, 1, 2) == (1,)
    assert reduced_path(t, 2, 1) == (-1,)
    with pytest.raises(DomainError):
        reduced_path(t, 0, 3)


def test_reduced_path_matches_networkx():
    rng = random.Random(3)
    for _ in range(40):
        t = random_tree(rng.randint(2, 10), rng)
        for u, w in itertools.product(range(1, t.v + 1), repeat=2):
            assert reduced_path(t, u, w) == tree_path_edges(t.v, t.edges, u, w)


def test_identity_perm_gives_identity_matrix():
    rng = random.Random(4)
    for _ in range(10):
        t = random_tree(rng.randint(2, 9), rng)
        _, om = tree_matrices(TreeVertexMap(t, Permutation.identity(t.v)))
        assert om == SignedMatrix.identity(t.e)
        assert tree_trace_check(TreeVertexMap(t, Permutation.identity(t.v))) == t.e


def test_matrix_entries_are_unit():
    rng = random.Random(5)
    for _ in range(50):
        v = rng.randint(3, 9)
        m, om = tree_matrices(TreeVertexMap(random_tree(v, rng), random_derangement(v, rng)))
        assert abs(om) == m
        assert all(x in (0, 1) for row in m.tolist() for x in row)


def test_random_tree_trace_property():
    rng = random.Random(2024)
    for _ in range(200):
        v = rng.randint(3, 9)
        tvm = TreeVertexMap(random_tree(v, rng), random_derangement(v, rng))
        assert tree_trace_check(tvm) == -1
        assert sum(dot_certificate(tvm)) == v


def test_seven_vertex_cycle_trace():
    rng = random.Random(7)
    tvm = random_single_orbit(7, rng)
    assert tree_trace_check(tvm) == -1


def test_orientation_choice_leaves_traces_invariant():
    rng = random.Random(6)
    for _ in range(30):
        v = rng.randint(3, 8)
        tvm = TreeVertexMap(random_tree(v, rng), random_derangement(v, rng))
        flips = {j for j in range(1, v) if rng.random() < 0.5}
        other = TreeVertexMap(tvm.tree.reoriented(flips), tvm.perm)
        _, a = tree_matrices(tvm)
        _, b = tree_matrices(other)
        d = SignedMatrix(tuple(tuple((-1 if i + 1 in flips else 1) * int(i == j) for j in range(v - 1))
                               for i in range(v - 1)))
        assert b == d @ a @ d
        for k in range(1, 5):
            assert trace(mat_pow(a, k)) == trace(mat_pow(b, k))


def test_power_identity_on_nine_vertex_tree():
    tvm = nine_vertex_example()
    _, om = tree_matrices(tvm)
    routes = tvm.routes()
    for k in range(1, 5):
        it = iterate_routes(routes, k)
        pk = power(tvm.perm, k)
        assert it == tuple(reduced_path(tvm.tree, pk(a), pk(b)) for a, b in tvm.tree.edges)
        assert _occurrence_matrices(tvm.tree.e, it)[1] == mat_pow(om, k)


def test_reduce_route():
    assert reduce_route((1, 2, -2, 3)) == (1, 3)
    assert reduce_route((1, 2, -2, -1)) == ()


@pytest.mark.parametrize("n", range(2, 7))
def test_path_tree_is_the_interval_model(n):
    for theta in enumerate_cycles(n):
        m, om = tree_matrices(TreeVertexMap(path_tree(n), theta))
        assert m == markov_matrix(theta)
        assert om == om_of(theta)


def test_json_round_trip():
    tvm = nine_vertex_example()
    again = TreeVertexMap.from_json(tvm.to_json())
    assert tree_matrices(again) == tree_matrices(tvm)


def test_walk_witness_precondition():
    t = path_tree(4)
    with pytest.raises(DomainError):
        tree_walk_witnesses(TreeVertexMap(t, Permutation.parse("(1,2)(3,4)")), 2)


def test_forcing_walks_on_small_trees():
    rng = random.Random(11)
    for _ in range(150):
        v = rng.randint(2, 7)
        tvm = random_single_orbit(v, rng)
        for m in sorted(basic_forced(v, 8) - {v}):
            w = tree_walk_witnesses(tvm, m)
            assert w is not None, (tvm.to_json(), m)
            assert w.sign == -1 and w.length == m and not is_repetitive(w)


# --- circle, as a graph with explicit routes ---------------------------------

CIRCLE = {"v": 4, "edges": [[1, 2], [2, 3], [3, 4], [4, 1]], "perm": "1,2,3,4"}


def test_circle_rotation():
    gvm = GraphVertexMap.from_json({**CIRCLE, "routes": [[2], [3], [4], [1]]})
    _, om = graph_matrices(gvm)
    assert om.tolist() == [[0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]
    assert trace(om) == 0


def test_circle_endpoint_mismatch():
    with pytest.raises(ValidationError, match="E1"):
        GraphVertexMap.from_json({**CIRCLE, "routes": [[3], [3], [4], [1]]})


def test_circle_backtrack_rejected():
    with pytest.raises(ValidationError, match="backtracks"):
        GraphVertexMap.from_json({**CIRCLE, "routes": [[2, 3, -3], [3], [4], [1]]})


def test_circle_long_way_round():
    gvm = GraphVertexMap.from_json({**CIRCLE, "routes": [[-1, -4, -3], [3], [4], [1]]})
    m, om = graph_matrices(gvm)
    assert [om[i, 0] for i in range(4)] == [-1, 0, -1, -1]
    assert sum(1 for i in range(4) if m[i, 0]) == 3
