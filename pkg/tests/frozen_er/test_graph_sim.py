import pytest

from src.frozen_er import graph_sim
from src.frozen_er.enums import ComponentStatus, TransitionKind
from src.frozen_er.errors import ConfigurationError, OrderingError
from src.frozen_er.schema.graph_state import EdgeSample


def make_edge(state, a: int, b: int, u: float = 0.5) -> EdgeSample:
    return EdgeSample(m=state.m + 1, a=a, b=b, u=u)


def make_frozen_pair(p: float):
    """Vertices 1 and 2 frozen by self-loops, vertex 3 a lone tree."""
    state = graph_sim.init_graph(3, p, seed=0)
    graph_sim.apply_edge_sample(state, make_edge(state, 1, 1))
    graph_sim.apply_edge_sample(state, make_edge(state, 2, 2))
    return state


def test_init_graph_is_all_singleton_trees():
    state = graph_sim.init_graph(5, 0.5, seed=42)
    records = graph_sim.component_records(state)
    assert len(records) == 5
    assert all(r.status == ComponentStatus.TREE and r.size == 1 for r in records)
    assert state.frozen_vertices == 0
    assert state.m == 0

    single = graph_sim.init_graph(1, 0.0, seed=7)
    assert [r.size for r in graph_sim.component_records(single)] == [1]


def test_init_graph_rejects_bad_parameters():
    with pytest.raises(ConfigurationError):
        graph_sim.init_graph(0, 0.5, seed=1)
    with pytest.raises(ConfigurationError):
        graph_sim.init_graph(10, 1.5, seed=1)
    with pytest.raises(ConfigurationError):
        graph_sim.init_graph(10, 0.5, seed=-1)


def test_tree_tree_merge():
    state = graph_sim.init_graph(2, 0.5, seed=0)
    kind = graph_sim.apply_edge_sample(state, make_edge(state, 1, 2))
    assert kind == TransitionKind.TREE_TREE_MERGE
    (record,) = graph_sim.component_records(state)
    assert record.size == 2 and record.status == ComponentStatus.TREE and record.kept_edges == 1


def test_self_loop_freezes_singleton():
    state = graph_sim.init_graph(2, 0.5, seed=0)
    kind = graph_sim.apply_edge_sample(state, make_edge(state, 1, 1))
    assert kind == TransitionKind.TREE_CYCLE_FREEZE
    assert graph_sim.observables(state).frozen_sizes == [1]
    assert state.frozen_vertices == 1


def test_edge_between_frozen_components_is_discarded():
    state = make_frozen_pair(p=1.0)
    before = graph_sim.component_records(state)
    kind = graph_sim.apply_edge_sample(state, make_edge(state, 1, 2, u=0.01))
    assert kind == TransitionKind.FROZEN_FROZEN_DISCARD
    assert state.discarded == 1
    assert graph_sim.component_records(state) == before


def test_tree_to_frozen_edge_follows_keep_mark():
    kept = make_frozen_pair(p=0.5)
    assert graph_sim.apply_edge_sample(kept, make_edge(kept, 3, 1, u=0.4)) == TransitionKind.TREE_FROZEN_KEPT
    assert kept.frozen_vertices == 3

    dropped = make_frozen_pair(p=0.5)
    assert graph_sim.apply_edge_sample(dropped, make_edge(dropped, 3, 1, u=0.7)) == TransitionKind.TREE_FROZEN_DISCARDED
    assert dropped.frozen_vertices == 2
    assert dropped.discarded == 1


def test_keep_mark_extremes():
    # u lies in (0, 1]: p = 1 always keeps, p = 0 always discards
    always = make_frozen_pair(p=1.0)
    assert graph_sim.apply_edge_sample(always, make_edge(always, 3, 2, u=1.0)) == TransitionKind.TREE_FROZEN_KEPT
    never = make_frozen_pair(p=0.0)
    assert graph_sim.apply_edge_sample(never, make_edge(never, 3, 2, u=1e-12)) == TransitionKind.TREE_FROZEN_DISCARDED


def test_classical_tracker_sees_discarded_edges():
    state = make_frozen_pair(p=0.0)
    graph_sim.apply_edge_sample(state, make_edge(state, 1, 2))
    classical = graph_sim.coupled_classical_observables(state)
    # G keeps the edge F discarded
    assert classical.classical_sizes == [2, 1]
    assert classical.surplus_vertices == 2


def test_critical_edge_count():
    assert graph_sim.critical_edge_count(1000, 0.0) == 500
    assert graph_sim.critical_edge_count(1000, 2.0) == 600
    assert graph_sim.critical_edge_count(1000, -20.0) == 0


def test_run_to_time_examines_exactly_m_edges():
    state = graph_sim.init_graph(1000, 0.5, seed=3)
    graph_sim.run_to_time(state, 2.0)
    assert state.m == 600
    assert state.kept + state.discarded == 600


def test_run_to_time_never_rewinds():
    state = graph_sim.init_graph(1000, 0.5, seed=3)
    graph_sim.run_to_time(state, 0.0)
    with pytest.raises(OrderingError):
        graph_sim.run_to_time(state, -1.0)
    with pytest.raises(OrderingError):
        graph_sim.run_to_edge(state, 10)


def test_same_seed_same_trajectory():
    first = graph_sim.init_graph(500, 0.5, seed=11)
    second = graph_sim.init_graph(500, 0.5, seed=11)
    kinds_first = [graph_sim.apply_edge(first) for _ in range(1200)]
    kinds_second = [graph_sim.apply_edge(second) for _ in range(1200)]
    assert kinds_first == kinds_second
    assert graph_sim.component_records(first) == graph_sim.component_records(second)


def test_edge_sample_replays_the_stream():
    streamed = graph_sim.init_graph(200, 0.5, seed=5)
    replayed = graph_sim.init_graph(200, 0.5, seed=5)
    for m in range(1, 401):
        edge = graph_sim.edge_sample(5, 200, m)
        assert 1 <= edge.a <= 200 and 1 <= edge.b <= 200
        assert 0.0 < edge.u <= 1.0
        assert graph_sim.apply_edge(streamed) == graph_sim.apply_edge_sample(replayed, edge)
    assert graph_sim.observables(streamed) == graph_sim.observables(replayed)


def test_observables_partition_vertices_and_frozen_are_unicyclic():
    state = graph_sim.init_graph(2000, 0.5, seed=9)
    graph_sim.run_to_time(state, 3.0)
    observed = graph_sim.observables(state)
    assert sum(observed.frozen_sizes) + sum(observed.standard_sizes) == 2000
    assert observed.frozen_sizes == sorted(observed.frozen_sizes, reverse=True)
    assert observed.standard_sizes == sorted(observed.standard_sizes, reverse=True)
    assert observed.frozen_mass_rescaled == pytest.approx(state.frozen_vertices / 2000 ** (2 / 3))
    for record in graph_sim.component_records(state):
        if record.status == ComponentStatus.FROZEN:
            assert record.kept_edges == record.size
        else:
            assert record.kept_edges == record.size - 1
    assert graph_sim.max_surplus(state) <= 1


def test_initial_classical_observables():
    state = graph_sim.init_graph(50, 1.0, seed=2)
    classical = graph_sim.coupled_classical_observables(state)
    assert classical.surplus_vertices == 0
    assert classical.classical_sizes == [1] * 50


def test_p1_coupling_identities_hold_at_every_edge():
    state = graph_sim.init_graph(800, 1.0, seed=21)
    for _ in range(2400):
        kind = graph_sim.apply_edge(state)
        assert kind != TransitionKind.TREE_FROZEN_DISCARDED
        assert state.frozen_vertices == state.surplus_vertices
        assert graph_sim.forest_parts_coincide(state)


def test_p0_never_attaches_trees_to_frozen_components():
    state = graph_sim.init_graph(800, 0.0, seed=4)
    kinds = {graph_sim.apply_edge(state) for _ in range(2400)}
    assert TransitionKind.TREE_FROZEN_KEPT not in kinds
    assert TransitionKind.TREE_FROZEN_DISCARDED in kinds


def test_kept_kinds():
    assert {kind for kind in TransitionKind if kind.kept} == {
        TransitionKind.TREE_TREE_MERGE,
        TransitionKind.TREE_CYCLE_FREEZE,
        TransitionKind.TREE_FROZEN_KEPT,
    }


def test_next_edge_does_not_advance():
    state = graph_sim.init_graph(50, 0.5, seed=11)
    graph_sim.run_to_edge(state, 7)
    edge = graph_sim.next_edge(state)
    assert edge == graph_sim.next_edge(state)
    assert edge == graph_sim.edge_sample(11, 50, 8)
    assert state.m == 7


def test_component_structure_after_every_kept_edge():
    state = graph_sim.init_graph(400, 0.5, seed=21)
    kept = 0
    while state.m < 800:
        edge = graph_sim.next_edge(state)
        if graph_sim.apply_edge_sample(state, edge).kept:
            kept += 1
            status, surplus = graph_sim.component_structure(state, edge.a)
            assert surplus == (1 if status == ComponentStatus.FROZEN else 0), edge
    assert kept == state.kept


def test_component_structure_of_frozen_pair():
    state = make_frozen_pair(p=1.0)
    assert graph_sim.component_structure(state, 1) == (ComponentStatus.FROZEN, 1)
    assert graph_sim.component_structure(state, 3) == (ComponentStatus.TREE, 0)
