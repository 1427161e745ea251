from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse import csr_matrix

from chainrec.errors import ConfigError
from chainrec.graph import (
    BoxPartition,
    build_graph,
    chain_recurrent_set,
    chain_set,
    epsilon_chain_exists,
    forward_invariance_violations,
    refine,
    refinement_violations,
    strong_components,
    tarjan_scc,
    transitive_closure,
)
from chainrec.maps import logistic, polynomial


def test_partition_needs_power_of_two():
    with pytest.raises(ConfigError, match="n_boxes must be a power of two"):
        BoxPartition(0.0, 1.0, 1000)


def test_partition_geometry():
    p = BoxPartition(0.0, 1.0, 8)
    assert p.h == 0.125
    assert p.index_of(0.3) == 2
    assert p.index_of(1.0) == 7
    lo, hi = p.boxes_meeting(0.25, 0.5)
    assert (int(lo), int(hi)) == (2, 3)


def test_eps_below_box_width_is_rejected():
    f = logistic()
    p = BoxPartition.of(f, 64)
    with pytest.raises(ConfigError, match="below the box width"):
        build_graph(f, 3.2, p, eps=p.h / 2)


def test_full_logistic_is_recurrent_everywhere():
    a = chain_set(logistic(), 4.0, 2**12)
    assert a.measure >= 0.99
    assert a.n_components == 1


def test_hyperbolic_covering_shrinks_under_refinement():
    f = logistic()
    a = chain_set(f, 3.2, 2**10)
    measures = [a.measure]
    for _ in range(3):
        b = refine(f, 3.2, a)
        assert refinement_violations(a, b).size == 0
        a = b
        measures.append(a.measure)
    assert all(m2 < m1 for m1, m2 in zip(measures, measures[1:]))


def test_identity_map_keeps_every_box():
    f = polynomial([[0.0, 0.0], [1.0, 0.0]], (0.0, 1.0), (0.0, 1.0), "identity")
    a = chain_set(f, 0.5, 64)
    assert a.boxes.size == 64
    b = refine(f, 0.5, a)
    assert b.boxes.size == 128


def test_attracting_fixed_point_at_zero():
    a = chain_set(logistic(), 0.5, 2**10)
    assert a.boxes.max() <= 3


def test_coverings_are_forward_invariant():
    f = logistic()
    for lam in (3.2, 3.5, 3.83, 3.9):
        assert forward_invariance_violations(chain_set(f, lam, 2**11)).size == 0


def _random_graph(draw_edges, n):
    rows, cols = zip(*draw_edges) if draw_edges else ((), ())
    m = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    m.sum_duplicates()
    return m


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                                             max_size=4 * n))))
def test_tarjan_matches_scipy(data):
    from scipy.sparse.csgraph import connected_components

    n, edges = data
    m = _random_graph(edges, n)
    ours = tarjan_scc(m.indptr, m.indices)
    _, ref = connected_components(m, directed=True, connection="strong")
    # same partition up to relabelling
    pairs = set(zip(ours.tolist(), ref.tolist()))
    assert len(pairs) == len(set(ours.tolist())) == len(set(ref.tolist()))


@pytest.mark.parametrize("lam", [3.2, 3.74, 3.9])
def test_scc_methods_agree_on_coverings(lam):
    f = logistic()
    g = build_graph(f, lam, BoxPartition.of(f, 2**10))
    a = chain_recurrent_set(g, "scipy")
    b = chain_recurrent_set(g, "tarjan")
    assert np.array_equal(a.boxes, b.boxes)
    assert np.array_equal(a.labels, b.labels)
    assert strong_components(g, "tarjan").size == g.n_nodes


def test_chain_queries_match_closure():
    f = logistic()
    g = build_graph(f, 3.83, BoxPartition.of(f, 2**8))
    reach = transitive_closure(g)
    rng = np.random.default_rng(7)
    for i, j in rng.integers(0, 2**8, size=(200, 2)):
        assert epsilon_chain_exists(g, int(i), int(j)) == bool(reach[i, j])
