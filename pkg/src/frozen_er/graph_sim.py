"""Exact simulation of the frozen Erdos-Renyi graph F_p(n, m).

Edges E_m = {a, b} with a, b uniform on 1..n (self-loops and repeats allowed) are
examined one at a time together with a keep-mark U_m uniform on (0, 1]:

  - an edge between two trees is added; a cycle created inside a tree freezes it
  - an edge with both endpoints frozen is discarded
  - an edge between a tree and a frozen component is kept iff U_m <= p

The same edge sequence drives a classical multigraph G(n, m) (no discards), with
an integer surplus per component, so the p = 1 coupling identities can be checked
edge by edge.
"""

import logging
import math
from fractions import Fraction

from pydantic import ValidationError

from src.frozen_er.constants import EDGE_BLOCK_SIZE
from src.frozen_er.enums import ComponentStatus, TransitionKind
from src.frozen_er.errors import ConfigurationError, OrderingError
from src.frozen_er.schema.graph_state import ClassicalObservables, ComponentRecord, EdgeSample, GraphObservables, GraphState
from src.frozen_er.utils import rng

logger = logging.getLogger(__name__)


def init_graph(n: int, p: float, seed: int) -> GraphState:
    """n singleton trees, nothing examined yet."""
    if not 1 <= n < 2**32:
        raise ConfigurationError(f"vertex count must be in [1, 2^32), got {n}")
    try:
        return GraphState(
            n=n,
            p=p,
            seed=seed,
            parent=list(range(n)),
            size=[1] * n,
            status=[ComponentStatus.TREE] * n,
            kept_edges=[0] * n,
            classical_parent=list(range(n)),
            classical_size=[1] * n,
            surplus=[0] * n,
            tree_size_counts={1: n},
            forest_size_counts={1: n},
        )
    except ValidationError as exc:
        raise ConfigurationError(f"invalid graph parameters: {exc}") from exc


def _find(parent: list[int], v: int) -> int:
    # path halving
    while parent[v] != v:
        parent[v] = parent[parent[v]]
        v = parent[v]
    return v


def _adjust(counts: dict[int, int], size: int, delta: int) -> None:
    left = counts.get(size, 0) + delta
    if left:
        counts[size] = left
    else:
        counts.pop(size, None)


# =============================================================================
# EDGE STREAM
# =============================================================================


def edge_sample(seed: int, n: int, m: int) -> EdgeSample:
    """The m-th examined edge (1-based) of the stream fixed by `seed`, with its keep-mark."""
    a, b, u = rng.edge_block(seed, n, m, 1)
    return EdgeSample(m=m, a=int(a[0]) + 1, b=int(b[0]) + 1, u=float(u[0]))


def next_edge(state: GraphState) -> EdgeSample:
    """The next edge of the state's own stream, without applying it."""
    m = state.m + 1
    offset = m - state._block_start
    if not 0 <= offset < len(state._block_a):
        a, b, u = rng.edge_block(state.seed, state.n, m, EDGE_BLOCK_SIZE)
        state._block_start, state._block_a, state._block_b, state._block_u = m, a.tolist(), b.tolist(), u.tolist()
        offset = 0
    return EdgeSample(m=m, a=state._block_a[offset] + 1, b=state._block_b[offset] + 1, u=state._block_u[offset])


# =============================================================================
# TRANSITIONS
# =============================================================================


def _apply_classical(state: GraphState, a: int, b: int) -> None:
    parent, size, surplus = state.classical_parent, state.classical_size, state.surplus
    ra, rb = _find(parent, a), _find(parent, b)
    if ra == rb:
        surplus[ra] += 1
        if surplus[ra] == 1:
            state.surplus_vertices += size[ra]
            _adjust(state.forest_size_counts, size[ra], -1)
        return

    if size[ra] < size[rb]:
        ra, rb = rb, ra
    for root in (ra, rb):
        if surplus[root] == 0:
            _adjust(state.forest_size_counts, size[root], -1)
    if surplus[ra] == 0 and surplus[rb] > 0:
        state.surplus_vertices += size[ra]
    elif surplus[rb] == 0 and surplus[ra] > 0:
        state.surplus_vertices += size[rb]
    parent[rb] = ra
    size[ra] += size[rb]
    surplus[ra] += surplus[rb]
    if surplus[ra] == 0:
        _adjust(state.forest_size_counts, size[ra], +1)


def _merge(state: GraphState, keep: int, other: int, status: ComponentStatus) -> None:
    """Attach `other` under `keep` (or the reverse, by size) with the edge just examined."""
    parent, size = state.parent, state.size
    if size[keep] < size[other]:
        keep, other = other, keep
    parent[other] = keep
    size[keep] += size[other]
    state.kept_edges[keep] += state.kept_edges[other] + 1
    state.status[keep] = status


def apply_edge_sample(state: GraphState, edge: EdgeSample) -> TransitionKind:
    """Apply one examined edge, with its keep-mark `edge.u`, to F and to the coupled G."""
    a, b = edge.a - 1, edge.b - 1
    _apply_classical(state, a, b)
    state.m += 1

    ra, rb = _find(state.parent, a), _find(state.parent, b)
    frozen_a = state.status[ra] == ComponentStatus.FROZEN
    frozen_b = state.status[rb] == ComponentStatus.FROZEN

    if frozen_a and frozen_b:
        state.discarded += 1
        return TransitionKind.FROZEN_FROZEN_DISCARD

    if ra == rb:
        size = state.size[ra]
        state.status[ra] = ComponentStatus.FROZEN
        state.kept_edges[ra] += 1
        state.frozen_vertices += size
        _adjust(state.tree_size_counts, size, -1)
        return TransitionKind.TREE_CYCLE_FREEZE

    if not frozen_a and not frozen_b:
        _adjust(state.tree_size_counts, state.size[ra], -1)
        _adjust(state.tree_size_counts, state.size[rb], -1)
        _merge(state, ra, rb, ComponentStatus.TREE)
        _adjust(state.tree_size_counts, state.size[_find(state.parent, ra)], +1)
        return TransitionKind.TREE_TREE_MERGE

    tree_root = rb if frozen_a else ra
    if edge.u > state.p:
        state.discarded += 1
        return TransitionKind.TREE_FROZEN_DISCARDED
    tree_size = state.size[tree_root]
    _adjust(state.tree_size_counts, tree_size, -1)
    state.frozen_vertices += tree_size
    _merge(state, ra, rb, ComponentStatus.FROZEN)
    return TransitionKind.TREE_FROZEN_KEPT


def apply_edge(state: GraphState) -> TransitionKind:
    """Draw the next edge of the seeded stream and apply it."""
    return apply_edge_sample(state, next_edge(state))


def critical_edge_count(n: int, t: float) -> int:
    """m(t) = max(floor(n/2 + (t/2) n^{2/3}), 0), exact when n is a perfect cube."""
    if n < 1:
        raise ConfigurationError(f"vertex count must be positive, got {n}")
    cube_root = round(n ** (1.0 / 3.0))
    if cube_root**3 == n:
        m = math.floor(Fraction(n, 2) + Fraction(t) * cube_root * cube_root / 2)
    else:
        m = math.floor(n / 2 + t / 2 * n ** (2.0 / 3.0))
    return max(m, 0)


def run_to_edge(state: GraphState, m: int) -> GraphState:
    if m < state.m:
        raise OrderingError(f"cannot rewind from m={state.m} to m={m}")
    while state.m < m:
        apply_edge(state)
    return state


def run_to_time(state: GraphState, t: float) -> GraphState:
    """Examine edges until m = m(t) edges have been seen in total."""
    target = critical_edge_count(state.n, t)
    if target < state.m:
        raise OrderingError(f"time t={t} maps to m={target}, before the current m={state.m}")
    logger.debug("advancing n=%d p=%g from m=%d to m=%d", state.n, state.p, state.m, target)
    return run_to_edge(state, target)


# =============================================================================
# OBSERVABLES
# =============================================================================


def component_records(state: GraphState) -> list[ComponentRecord]:
    """One record per component of F, sorted by decreasing size then smallest vertex."""
    smallest: dict[int, int] = {}
    for v in range(state.n):
        smallest.setdefault(_find(state.parent, v), v + 1)
    records = [
        ComponentRecord(
            root=root,
            smallest_vertex=vertex,
            size=state.size[root],
            status=state.status[root],
            kept_edges=state.kept_edges[root],
        )
        for root, vertex in smallest.items()
    ]
    records.sort(key=lambda record: (-record.size, record.smallest_vertex))
    return records


def observables(state: GraphState) -> GraphObservables:
    records = component_records(state)
    return GraphObservables(
        frozen_sizes=[r.size for r in records if r.status == ComponentStatus.FROZEN],
        standard_sizes=[r.size for r in records if r.status == ComponentStatus.TREE],
        frozen_mass_rescaled=state.frozen_vertices / state.n ** (2.0 / 3.0),
        discarded=state.discarded,
    )


def coupled_classical_observables(state: GraphState) -> ClassicalObservables:
    roots = {_find(state.classical_parent, v) for v in range(state.n)}
    sizes = sorted((state.classical_size[root] for root in roots), reverse=True)
    return ClassicalObservables(surplus_vertices=state.surplus_vertices, classical_sizes=sizes)


def forest_parts_coincide(state: GraphState) -> bool:
    """Whether the tree sizes of F and the surplus-0 sizes of G agree as multisets."""
    return state.tree_size_counts == state.forest_size_counts


def component_structure(state: GraphState, v: int) -> tuple[ComponentStatus, int]:
    """Status and kept-edge surplus of the component of F holding vertex v (1-based)."""
    root = _find(state.parent, v - 1)
    return state.status[root], state.kept_edges[root] - state.size[root] + 1


def max_surplus(state: GraphState) -> int:
    """Largest kept-edge surplus over the components of F (0 for trees, 1 for unicycles)."""
    return max(record.kept_edges - record.size + 1 for record in component_records(state))
