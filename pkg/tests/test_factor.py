import json
from collections import Counter

import pytest

from hwpkit.factor import (CayleyGraph, CompleteGraph, EquipartiteGraph, Factor,
                           TwoFactorization, build_cayley_graph,
                           factorization_from_json, factorization_to_json,
                           graph_from_descriptor, rsm_to_factorization,
                           verify_factorization, verify_two_factor)
from hwpkit.groups import cyclic_group, dihedral_group, two_gamma
from hwpkit.rsm import (RowSumMatrix, RsmSpec, build_abelian_rsm,
                        build_dihedral_rsm, row_sum_orders)


def test_build_cayley_graph_examples():
    z3 = cyclic_group(3)
    g = build_cayley_graph(3, z3, [(1,)])
    assert g.vertex_count == 9 and g.edge_count == 9 and g.degree == 2

    z4 = cyclic_group(4)
    g = build_cayley_graph(3, z4, z4.elements)
    assert g.vertex_count == 12 and g.edge_count == 48

    gd = dihedral_group(1, 1, 0)
    sub, _ = two_gamma(gd)
    g = build_cayley_graph(4, gd, sub)
    assert g.degree == 2

    with pytest.raises(ValueError):
        CayleyGraph(2, z3, (0,))


def test_single_row_factorization():
    z3 = cyclic_group(3)
    gi = z3.index((1,))
    M = RowSumMatrix(z3, (gi,), ((gi, gi, gi),), "custom")
    tf = rsm_to_factorization(M)
    assert len(tf.factors) == 1
    assert tf.factors[0].cycle_length == 3
    assert len(tf.factors[0].cycles) == 3
    assert verify_factorization(tf.graph, tf, Counter({3: 1}))


def test_abelian_factorization_profile():
    M = build_abelian_rsm(1, 1, 1, 0, 2, 0, 3)
    tf = rsm_to_factorization(M)
    assert tf.profile() == Counter({3: 4})


def test_dihedral_factorization_profile():
    M = build_dihedral_rsm(RsmSpec(0, 3, 1, 3, 6, 6), seed=0)
    tf = rsm_to_factorization(M)
    assert tf.profile() == Counter({9: 6, 3: 6})
    expected = Counter({3 * o: c for o, c in row_sum_orders(M).items()})
    assert verify_factorization(tf.graph, tf, expected)


def test_factor_lengths_match_row_sum_orders():
    M = build_dihedral_rsm(RsmSpec(1, 1, 3, 4, 11, 13), seed=1)
    tf = rsm_to_factorization(M)
    expected = Counter({4 * o: c for o, c in row_sum_orders(M).items()})
    assert tf.profile() == expected


def test_verify_two_factor_examples():
    k5 = CompleteGraph(5)
    assert verify_two_factor(k5, [[0, 1, 2, 3, 4]], 5)
    assert not verify_two_factor(k5, [[0, 1, 2, 3, 4]], 4)
    assert not verify_two_factor(k5, [[0, 1, 2, 3]], 5)       # not spanning
    assert not verify_two_factor(k5, [[0, 1, 2], [2, 3, 4]], 3)  # repeats a vertex


def test_verify_two_factor_respects_removed_matching():
    k4 = CompleteGraph(4, ((0, 1), (2, 3)))
    assert verify_two_factor(k4, [[0, 2, 1, 3]], 4)
    assert not verify_two_factor(k4, [[0, 1, 2, 3]], 4)   # uses removed edge 0-1


def test_verify_factorization_mutations():
    M = build_dihedral_rsm(RsmSpec(0, 3, 1, 3, 6, 6), seed=0)
    tf = rsm_to_factorization(M)
    dropped = TwoFactorization(tf.graph, tf.factors[1:])
    assert not verify_factorization(dropped.graph, dropped)
    doubled = TwoFactorization(tf.graph, tf.factors + [tf.factors[0]])
    assert not verify_factorization(doubled.graph, doubled)


def test_cayley_is_blown_cycle():
    # C_g[Gamma, Gamma] has the size and regularity of C_g[n]
    g = build_cayley_graph(3, cyclic_group(4), cyclic_group(4).elements)
    assert g.edge_count == 3 * 4 * 4
    assert g.degree == 8
    # every vertex of column i is adjacent to every vertex of column i+1
    z4 = cyclic_group(4)
    for x in z4.elements:
        for y in z4.elements:
            assert g.has_edge(g.vertex_id(0, x), g.vertex_id(1, y))
            assert not g.has_edge(g.vertex_id(0, x), g.vertex_id(0, y))


def test_walk_start_independence():
    # the cycle partition is independent of traversal details: factor sets
    # from the same row agree as edge sets however cycles are rotated
    M = build_dihedral_rsm(RsmSpec(1, 1, 1, 3, 3, 5), seed=2)
    tf = rsm_to_factorization(M)
    for f in tf.factors:
        edges = set()
        for cyc in f.cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                edges.add((min(a, b), max(a, b)))
        assert len(edges) == sum(len(c) for c in f.cycles)


def test_factorization_json_round_trip():
    M = build_dihedral_rsm(RsmSpec(0, 3, 1, 3, 6, 6), seed=0)
    tf = rsm_to_factorization(M)
    doc = json.loads(json.dumps(factorization_to_json(tf)))
    assert doc["schema"] == 1 and doc["edge_rule"] == "right-translation"
    tf2 = factorization_from_json(doc)
    assert verify_factorization(tf2.graph, tf2, tf.profile())
    assert graph_from_descriptor(doc["graph"]) == tf.graph
    labels = doc["vertex_labels"]
    assert labels[0] == "(0,((0,0),0))"


def test_equipartite_graph_edges():
    g = EquipartiteGraph(3, 4)
    assert g.edge_count == 48
    tfbad = TwoFactorization(g, [Factor(4, [[0, 1, 4, 5], [2, 3, 8, 9], [6, 7, 10, 11]])])
    # cycle [0,1,...] uses a within-part edge 0-1
    assert not verify_factorization(g, tfbad)
