import itertools

import pytest
from hypothesis import given, strategies as st

from combdyn.errors import DimensionError, DomainError
from combdyn.markov import (
    Edge,
    SignedMatrix,
    graph_from_matrices,
    markov_graph,
    markov_matrix,
    mat_mul,
    mat_pow,
    om_of,
    trace,
)
from combdyn.permutation import Permutation, compose, enumerate_cycles, enumerate_permutations, power

from oracles import covering_matrices, matpow

C4 = Permutation.parse("(1,2,3,4)")

# transcribed from the worked example
M = [[0, 0, 1], [1, 0, 1], [0, 1, 1]]
M2 = [[0, 1, 1], [0, 1, 2], [1, 1, 2]]
M4 = [[1, 2, 4], [2, 3, 6], [2, 4, 7]]
OM = [[0, 0, -1], [1, 0, -1], [0, 1, -1]]
OM2 = [[0, -1, 1], [0, -1, 0], [1, -1, 0]]
M_THETA2 = [[0, 1, 1], [0, 1, 0], [1, 1, 0]]


def test_worked_example_matrices():
    m = markov_matrix(C4)
    om = om_of(C4)
    assert m.tolist() == M
    assert mat_pow(m, 2).tolist() == M2
    assert mat_pow(m, 4).tolist() == M4
    assert om.tolist() == OM
    assert mat_mul(om, om).tolist() == OM2
    assert markov_matrix(power(C4, 2)).tolist() == M_THETA2
    assert om_of(power(C4, 2)).tolist() == OM2


def test_worked_example_traces():
    m = markov_matrix(C4)
    assert [trace(mat_pow(m, k)) for k in (1, 2, 4)] == [1, 3, 11]


def test_unsigned_matrices_of_iterate_and_power_differ():
    assert mat_pow(markov_matrix(C4), 2) != markov_matrix(power(C4, 2))


def test_graph_edges_of_example():
    g = markov_graph(C4)
    assert g.edges == (Edge(1, 2, 1), Edge(2, 3, 1), Edge(3, 1, -1), Edge(3, 2, -1), Edge(3, 3, -1))


def test_identity_and_reflection_graphs():
    g = markov_graph(Permutation.identity(4))
    assert g.edges == (Edge(1, 1, 1), Edge(2, 2, 1), Edge(3, 3, 1))
    assert markov_matrix(Permutation.identity(4)) == SignedMatrix.identity(3)
    assert markov_graph(Permutation.parse("(1,2)")).edges == (Edge(1, 1, -1),)


def test_small_examples():
    assert markov_matrix(Permutation.parse("(1,3,2)")).tolist() == [[1, 1], [1, 0]]
    assert om_of(Permutation.parse("(1,3,4,2)")).diagonal() == [-1, 1, -1]


def test_n1_rejected():
    with pytest.raises(DomainError):
        markov_graph(Permutation.identity(1))


def test_matrix_shape_errors():
    with pytest.raises(DimensionError):
        SignedMatrix(((1, 2), (3,)))
    with pytest.raises(DimensionError):
        SignedMatrix(())
    with pytest.raises(DimensionError):
        mat_mul(SignedMatrix.identity(2), SignedMatrix.identity(3))
    with pytest.raises(DomainError):
        mat_pow(SignedMatrix.identity(2), -1)


def test_identity_is_neutral():
    a = om_of(C4)
    assert mat_mul(a, SignedMatrix.identity(3)) == a
    assert mat_pow(a, 0) == SignedMatrix.identity(3)


def test_arbitrary_precision():
    m = markov_matrix(Permutation.parse("(1,7,2,6,3,5,4)"))
    big = trace(mat_pow(m, 100))
    assert big > 2**64
    assert big == sum(matpow(m.tolist(), 100)[i][i] for i in range(6))


@pytest.mark.parametrize("n", range(2, 8))
def test_matrices_match_covering_oracle(n):
    for theta in enumerate_permutations(n) if n <= 6 else enumerate_cycles(n):
        m, om = covering_matrices(theta.image)
        assert markov_matrix(theta).tolist() == m
        assert om_of(theta).tolist() == om
        assert abs(om_of(theta)) == markov_matrix(theta)


@pytest.mark.parametrize("n", range(2, 7))
def test_power_identity(n):
    for theta in enumerate_cycles(n):
        om = om_of(theta)
        for k in range(1, 13):
            assert mat_pow(om, k) == om_of(power(theta, k))


def test_product_identity():
    for n in range(2, 6):
        ps = list(enumerate_permutations(n))
        oms = {p: om_of(p) for p in ps}
        for a, b in itertools.product(ps, repeat=2):
            assert mat_mul(oms[a], oms[b]) == oms[compose(a, b)]


@pytest.mark.parametrize("n", range(2, 8))
def test_fixed_point_free_trace(n):
    for theta in enumerate_permutations(n):
        if all(theta(i) != i for i in range(1, n + 1)):
            assert trace(om_of(theta)) == -1


def test_finite_order_gives_identity():
    for n in range(2, 7):
        for theta in enumerate_permutations(n):
            assert om_of(power(theta, theta.order())) == SignedMatrix.identity(n - 1)


def test_dot_and_json():
    g = markov_graph(C4)
    dot = g.to_dot()
    assert dot.startswith("digraph markov {")
    assert '  E3 -> E1 [label="-"];' in dot
    assert dot.count("->") == 5
    m = om_of(C4)
    assert m.to_json() == {"d": 3, "entries": OM}
    assert SignedMatrix.from_json(m.to_json()) == m
    with pytest.raises(DimensionError):
        SignedMatrix.from_json({"d": 2, "entries": OM})


def test_graph_from_matrices_round_trip():
    for theta in enumerate_cycles(5):
        g = markov_graph(theta)
        assert graph_from_matrices(g.markov_matrix(), g.oriented_matrix()) == g


@given(st.lists(st.integers(-5, 5), min_size=9, max_size=9),
       st.lists(st.integers(-5, 5), min_size=9, max_size=9),
       st.lists(st.integers(-5, 5), min_size=9, max_size=9))
def test_mat_mul_associative(a, b, c):
    A, B, C = (SignedMatrix(tuple(tuple(x[3 * i:3 * i + 3]) for i in range(3))) for x in (a, b, c))
    assert mat_mul(mat_mul(A, B), C) == mat_mul(A, mat_mul(B, C))
