import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from influence_partition.graph import (EdgeListError, GraphValidationError, derive_lt_weights,
                                       dump_edge_list, from_edges, induced_subgraph,
                                       load_edge_list, read_edge_list, write_id_map)

from support import lt_graphs


def test_load_directed_lines():
    g = load_edge_list(["0 1", "1 2"])
    assert g.node_count == 3
    assert g.edge_set() == {(0, 1), (1, 2)}
    assert not g.has_weights


def test_load_undirected_expands_both_directions():
    g = load_edge_list(["a b"], directed=False)
    a, b = g.labels.index("a"), g.labels.index("b")
    assert g.edge_set() == {(a, b), (b, a)}


def test_weight_above_one_is_rejected():
    with pytest.raises(GraphValidationError):
        load_edge_list(["0 1 1.5"])


def test_incoming_sum_above_one_is_rejected():
    with pytest.raises(GraphValidationError):
        load_edge_list(["0 2 0.6", "1 2 0.6"])


@pytest.mark.parametrize("line", ["0 1 x", "0 1 0.5 9"])
def test_malformed_line_reports_line_number(line):
    with pytest.raises(EdgeListError) as err:
        load_edge_list(["# header", "0 1", line])
    assert err.value.line_number == 3


def test_comments_blank_lines_and_node_declarations():
    g = load_edge_list(["# c", "", "lonely", "x y"])
    assert g.node_count == 3
    assert g.labels == ("lonely", "x", "y")
    assert g.edge_set() == {(1, 2)}


def test_self_loops_and_duplicates_are_dropped():
    g = load_edge_list(["0 0", "0 1 0.3", "0 1 0.9"])
    assert g.edge_set() == {(0, 1)}
    assert g.edges()[0][2] == pytest.approx(0.3)


def test_structural_checks_in_constructor():
    with pytest.raises(GraphValidationError):
        from_edges(2, [(0, 0)])
    with pytest.raises(GraphValidationError):
        from_edges(2, [(0, 1), (0, 1)])
    with pytest.raises(GraphValidationError):
        from_edges(2, [(0, 5)])


def test_graph_arrays_are_read_only():
    g = from_edges(2, [(0, 1, 1.0)])
    with pytest.raises(ValueError):
        g.weight[0] = 0.5


def test_derive_weights_in_degree_four():
    g = derive_lt_weights(from_edges(5, [(k, 4) for k in range(4)]))
    assert all(w == pytest.approx(0.25) for _, _, w in g.edges())


def test_derive_weights_single_in_edge_and_isolated_node():
    g = derive_lt_weights(from_edges(3, [(0, 1)]))
    assert g.edges() == [(0, 1, 1.0)]
    assert g.node_count == 3
    g.check_weights()


def test_induced_subgraph_examples():
    tri = from_edges(3, [(0, 1), (1, 2), (2, 0)])
    assert induced_subgraph(tri, {0, 1}).edge_set() == {(0, 1)}
    assert induced_subgraph(tri, {0, 1, 2}).edge_set() == tri.edge_set()
    single = induced_subgraph(tri, {0})
    assert single.node_count == 1 and single.edge_count == 0
    with pytest.raises(KeyError):
        induced_subgraph(tri, {7})


def test_read_edge_list_and_id_map(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("u v\nv w\n")
    g = read_edge_list(path)
    write_id_map(g, tmp_path / "ids.csv")
    assert (tmp_path / "ids.csv").read_text().splitlines() == [
        "external_id,internal_id", "u,0", "v,1", "w,2"]


def test_bundled_coauthorship_file_loads():
    from pathlib import Path
    g = derive_lt_weights(read_edge_list(Path(__file__).parent / "data" / "lesmis.txt",
                                         directed=False))
    assert g.node_count == 77
    g.check_weights()


@settings(max_examples=60, deadline=None)
@given(lt_graphs(max_nodes=7))
def test_round_trip_rebuilds_identical_graph(g):
    relabelled = load_edge_list(dump_edge_list(g))
    again = load_edge_list(dump_edge_list(relabelled))
    assert again.same_as(relabelled)
    assert sorted(relabelled.edges()) == sorted(
        (s, d, w) for s, d, w in g.edges())


@settings(max_examples=60, deadline=None)
@given(lt_graphs(max_nodes=7))
def test_derived_weights_sum_to_one(g):
    d = derive_lt_weights(g)
    d.check_weights()
    sums = d.incoming_weight_sums()
    has_in = d.in_degree() > 0
    assert np.allclose(sums[has_in], 1.0, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(lt_graphs(max_nodes=7), st.data())
def test_induced_subgraph_keeps_weight_constraint(g, data):
    keep = data.draw(st.sets(st.integers(0, g.n - 1)))
    sub = induced_subgraph(g, keep)
    sub.check_weights()
    assert np.all(sub.incoming_weight_sums() <= g.incoming_weight_sums() + 1e-12)
    assert sub.edge_set() == {(s, d) for s, d in g.edge_set() if s in keep and d in keep}


def test_load_from_text_stream():
    g = load_edge_list(io.StringIO("0 1 0.5\n1 0 1.0\n"))
    assert g.has_weights and g.edge_count == 2
