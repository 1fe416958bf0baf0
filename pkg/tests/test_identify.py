import random
from itertools import combinations

import pytest

from latident import (
    Graph,
    LatentIsolatedError,
    LatentModel,
    SequenceCert,
    Status,
    anchored_ordering,
    classify,
    complement,
    find_generalized_sequence,
    find_identifying_sequence,
    induced_subgraph,
    latent_class_check,
    latent_partition,
    maximal_cliques,
    complete_subsets,
)
from latident.graph import _mask_of
from latident.identify import _generalized_ok, _plain_ok

from conftest import load_model, star_model


def observed_graph(name):
    m = load_model(name)
    return induced_subgraph(m.graph, sorted(m.observed_set))


def to_named(chain, node_map):
    return [sorted(node_map[v] for v in s) for s in chain]


# ---------------------------------------------------------------- partition


def test_latent_partition_path5(path5):
    s, t1 = latent_partition(path5)
    assert sorted(s) == [1, 2, 3, 4, 5]
    assert t1 == frozenset()


def test_latent_partition_with_t1():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (2, 3)])
    s, t1 = latent_partition(LatentModel.binary(g))
    assert sorted(s) == [1, 2]
    assert t1 == frozenset({3})


def test_latent_partition_isolated_hidden_node():
    g = Graph.from_edges(3, [(1, 2)])
    with pytest.raises(LatentIsolatedError):
        latent_partition(LatentModel.binary(g))


# ---------------------------------------------------------------- sequences


def test_generalized_sequence_on_path():
    g, node_map = observed_graph("path5")
    cert = find_generalized_sequence(g, frozenset({0, 1}))
    assert to_named(cert.chain, node_map) == [[1, 2], [4]]
    cert.validate(g)


def test_generalized_sequence_absent_for_triangle(triangle_pendants):
    g, node_map = observed_graph("triangle_pendants")
    local = frozenset({0, 3, 4})  # {1,4,5}
    assert find_generalized_sequence(g, local) is None


def test_generalized_sequence_on_clique_web():
    g, node_map = observed_graph("clique_web9")
    local = frozenset({0, 4, 7})  # {1,5,8}
    cert = find_generalized_sequence(g, local)
    assert cert is not None
    cert.validate(g)
    assert len(cert.chain[-1]) == 1


def test_generalized_sequence_input_validation():
    g, _ = observed_graph("path5")
    with pytest.raises(ValueError):
        find_generalized_sequence(g, frozenset({0}))
    with pytest.raises(ValueError):
        find_generalized_sequence(g, frozenset({0, 2}))  # {1,3} not complete


def test_identifying_sequence_on_path():
    g, node_map = observed_graph("path5")
    cert = find_identifying_sequence(g, frozenset({0, 1}))
    assert to_named(cert.chain, node_map) == [[1, 2], [4]]
    cert.validate(g)


def test_identifying_sequence_absent_cases():
    g, node_map = observed_graph("k4_pendants")
    assert find_identifying_sequence(g, frozenset({0, 3})) is None  # {1,4}
    assert find_identifying_sequence(g, frozenset({3, 4})) is None  # {4,5}
    assert find_identifying_sequence(g, frozenset({3, 5})) is None  # {4,6}


def test_identifying_sequence_present_off_hub():
    g, node_map = observed_graph("k4_pendants")
    cert = find_identifying_sequence(g, frozenset({0, 1}))  # {1,2}
    assert cert is not None
    cert.validate(g)


def test_consecutive_chain_elements_disjoint():
    # found plain sequences never share nodes between consecutive elements
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(2, 7)
        edges = [
            (i, j)
            for i, j in combinations(range(n), 2)
            if rng.random() < 0.5
        ]
        g = Graph.from_edges(n, edges)
        for s in complete_subsets(g, 2):
            cert = find_identifying_sequence(g, s)
            if cert is None:
                continue
            cert.validate(g)
            for a, b in zip(cert.chain, cert.chain[1:]):
                assert not (a & b)


def test_sequence_cert_validate_rejects_broken_chains():
    g, _ = observed_graph("path5")
    bad = SequenceCert(
        target=frozenset({0, 1}),
        chain=(frozenset({0, 1}), frozenset({1})),  # 1 is adjacent to 2
        kind="generalized",
    )
    assert not bad.is_valid(g)


# ---------------------------------------------------------------- ordering


def test_anchored_ordering_on_path_complement():
    g, node_map = observed_graph("path5")
    comp = complement(g)
    order = anchored_ordering(comp, frozenset({0, 2, 4}))  # {1,3,5}
    assert order is not None
    assert [node_map[v] for v in order[:3]] == [1, 3, 5]
    assert sorted(node_map[v] for v in order) == [1, 2, 3, 4, 5]
    placed = order[:3]
    for v in order[3:]:
        assert any(comp.has_edge(v, u) for u in placed)
        placed.append(v)


def test_anchored_ordering_whole_node_set_is_identity():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert anchored_ordering(g, frozenset(range(4))) == [0, 1, 2, 3]


def test_anchored_ordering_unreachable_node():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert anchored_ordering(g, frozenset({0})) is None


def test_anchored_ordering_pairing_property_random():
    rng = random.Random(5)
    for _ in range(120):
        n = rng.randint(2, 8)
        edges = [
            (i, j) for i, j in combinations(range(n), 2) if rng.random() < 0.45
        ]
        g = Graph.from_edges(n, edges)
        c = frozenset(rng.sample(range(n), rng.randint(1, n)))
        order = anchored_ordering(g, c)
        reachable = set(c)
        changed = True
        while changed:
            changed = False
            for v in range(n):
                if v not in reachable and reachable & g.neighbors(v):
                    reachable.add(v)
                    changed = True
        if reachable != set(range(n)):
            assert order is None
            continue
        assert order is not None
        assert order[: len(c)] == sorted(c)
        assert sorted(order) == list(range(n))
        for pos, v in enumerate(order):
            if v not in c:
                assert g.neighbors(v) & set(order[:pos])


# ---------------------------------------------------------------- classify


def test_classify_path5(path5):
    verdict = classify(path5)
    assert verdict.status is Status.IDENTIFIED_EVERYWHERE
    assert verdict.m_clique == frozenset({1, 3, 5})
    assert not verdict.probe_only
    assert len(verdict.clique_certs) == 4
    for clique, cert in verdict.clique_certs:
        assert cert is not None
        cert.validate(verdict.s_graph, verdict.s_node_map)


def test_classify_triangle_isolated(triangle_isolated):
    verdict = classify(triangle_isolated)
    assert verdict.status is Status.NOT_IDENTIFIED
    assert verdict.singular_system is None


def test_classify_triangle_pendants(triangle_pendants):
    verdict = classify(triangle_pendants)
    assert verdict.status is Status.GENERICALLY_IDENTIFIED
    assert not verdict.probe_only
    assert verdict.failed_cliques == (frozenset({1, 4, 5}),)
    assert verdict.failing_sets == (frozenset({1, 4, 5}),)
    assert len(verdict.singular_system.equations) == 3


def test_classify_probe_only_on_five_cycle():
    # observed 5-cycle: its complement is again a 5-cycle with no triangle
    edges = [(0, v) for v in range(1, 6)]
    edges += [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)]
    verdict = classify(LatentModel.binary(Graph.from_edges(6, edges)))
    assert verdict.status is Status.GENERICALLY_IDENTIFIED
    assert verdict.probe_only
    assert verdict.singular_system is None


def test_classify_uses_s_restriction(path5):
    # pendant observed node not adjacent to the hidden one leaves the verdict alone
    edges = sorted(path5.graph.edges) + [(5, 6)]
    m = LatentModel.binary(Graph.from_edges(7, edges))
    verdict = classify(m)
    assert verdict.t1_nodes == frozenset({6})
    assert sorted(verdict.s_nodes) == [1, 2, 3, 4, 5]
    assert verdict.status is Status.IDENTIFIED_EVERYWHERE


def test_classify_latent_isolated_propagates():
    g = Graph.from_edges(3, [(1, 2)])
    with pytest.raises(LatentIsolatedError):
        classify(LatentModel.binary(g))


def test_latent_class_check_matches_classify():
    assert not latent_class_check(1)
    assert not latent_class_check(2)
    assert latent_class_check(3)
    assert latent_class_check(5)
    with pytest.raises(ValueError):
        latent_class_check(0)
    assert classify(star_model(2)).status is Status.NOT_IDENTIFIED
    for n in (3, 4, 5):
        assert classify(star_model(n)).status is Status.IDENTIFIED_EVERYWHERE


def test_equivalence_of_sequence_notions_random_seven_nodes():
    # clique-level generalized sequences exist iff plain sequences exist for
    # every complete subset; spot-checked here on random 7-node graphs
    rng = random.Random(7)
    for _ in range(300):
        edges = [
            (i, j) for i, j in combinations(range(7), 2) if rng.random() < rng.uniform(0.2, 0.8)
        ]
        g = Graph.from_edges(7, edges)
        gen_ok = _generalized_ok(g)
        plain_ok = _plain_ok(g)
        a = all(
            _mask_of(c) in gen_ok for c in maximal_cliques(g) if len(c) > 1
        )
        b = all(_mask_of(s) in plain_ok for s in complete_subsets(g, 2))
        assert a == b


def test_existence_sets_agree_with_search():
    rng = random.Random(9)
    for _ in range(40):
        n = rng.randint(3, 7)
        edges = [
            (i, j) for i, j in combinations(range(n), 2) if rng.random() < 0.5
        ]
        g = Graph.from_edges(n, edges)
        gen_ok = _generalized_ok(g)
        plain_ok = _plain_ok(g)
        for s in complete_subsets(g, 2):
            cert = find_identifying_sequence(g, s)
            assert (cert is not None) == (_mask_of(s) in plain_ok)
            gcert = find_generalized_sequence(g, s)
            assert (gcert is not None) == (_mask_of(s) in gen_ok)
            if cert is not None:
                cert.validate(g)
            if gcert is not None:
                gcert.validate(g)
