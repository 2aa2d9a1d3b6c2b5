import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lllkit import NormalizerError, NotTransitiveError, PreconditionError
from lllkit.graphs import ColoredGraph
from lllkit.groups import FreeAbelian, FreeGroup, ball, family_from_spec, regular_action, schreier_graph
from lllkit.schreier import (
    ColoredSchreierPoint,
    GraphAutomorphism,
    automorphism_from_normalizer,
    find_automorphisms,
    repetitive_witness,
    stabilizer_on_patch,
)
from lllkit.thue import is_repetitive, verify_nonrepetitive


def cycle_point(n, colors):
    perm = [(i + 1) % n for i in range(n)]
    return ColoredSchreierPoint(schreier_graph(FreeAbelian(1), [perm]), colors)


def check_witness(point, w):
    graph = point.graph
    path = w.path
    assert len(path) % 2 == 0 and len(set(path)) == len(path)
    edges = {frozenset(e) for e in graph.undirected_edges()}
    assert all(frozenset((path[i], path[i + 1])) in edges for i in range(len(path) - 1))
    assert is_repetitive(point.colors, path)


@pytest.mark.parametrize("n, colors, g, length", [
    (4, (1, 2, 1, 2), (2,), 4),
    (6, (1, 2, 3, 1, 2, 3), (3,), 6),
    (2, (1, 1), (1,), 2),
])
def test_cycle_witnesses(n, colors, g, length):
    point = cycle_point(n, colors)
    theta = automorphism_from_normalizer(point, g)
    assert not theta.fixed_points and theta.preserves(colors)
    w = repetitive_witness(point, theta)
    assert len(w) == length
    check_witness(point, w)


def test_c4_witness_is_canonical():
    point = cycle_point(4, (1, 2, 1, 2))
    w = repetitive_witness(point, automorphism_from_normalizer(point, (2,)))
    assert w.path == (0, 1, 2, 3) and w.word == ("a", "a")


def test_identity_element_gives_identity_map():
    point = cycle_point(5, (1, 2, 3, 4, 5))
    theta = automorphism_from_normalizer(point, (0,))
    assert theta.is_identity
    with pytest.raises(PreconditionError):
        repetitive_witness(point, theta)


def test_color_breaking_automorphism_rejected():
    point = cycle_point(4, (1, 2, 3, 4))
    theta = automorphism_from_normalizer(point, (1,))
    with pytest.raises(PreconditionError):
        repetitive_witness(point, theta)


def test_non_normalizing_element():
    F = FreeGroup(2)
    graph = schreier_graph(F, [[1, 0, 2], [0, 2, 1]])
    point = ColoredSchreierPoint(graph, (1, 2, 3))
    with pytest.raises(NormalizerError) as err:
        automorphism_from_normalizer(point, F.parse("a"))
    v, name, w = err.value.edge
    assert name in F.names


def test_stabilizer_on_patch_equals_h():
    F = FreeGroup(2)
    graph = schreier_graph(F, [[1, 2, 0], [1, 2, 0]])
    point = ColoredSchreierPoint(graph, (1, 2, 3))
    patch = ball(F, 2)
    stab = stabilizer_on_patch(point, patch)
    # H is the kernel of the exponent sum mod 3
    assert stab == [g for g in patch.elements if sum(1 if x > 0 else -1 for x in g) % 3 == 0]
    assert stab == [g for g in patch.elements if graph.contains(g)]
    # with a constant coloring every normalizing element stabilizes
    assert len(stabilizer_on_patch(ColoredSchreierPoint(graph, (1, 1, 1)), patch)) == len(patch)


def test_stabilizer_on_cycle():
    point = cycle_point(4, (1, 2, 1, 2))
    assert stabilizer_on_patch(point, ball(FreeAbelian(1), 4)) == [(0,), (2,), (-2,), (4,), (-4,)]


def test_find_automorphisms():
    point = cycle_point(4, (1, 2, 1, 2))
    labeled = find_automorphisms(point.graph, point.colors)
    assert [a.perm for a in labeled] == [(0, 1, 2, 3), (2, 3, 0, 1)]
    # the dihedral group of the underlying 4-cycle
    assert len(find_automorphisms(point.graph, labeled=False)) == 8


def test_checked_automorphism():
    graph = cycle_point(4, (1, 1, 1, 1)).graph
    GraphAutomorphism.checked(graph, (1, 2, 3, 0))
    with pytest.raises(PreconditionError):
        GraphAutomorphism.checked(graph, (1, 0, 2, 3))


def test_point_round_trip():
    point = cycle_point(6, (1, 2, 3, 1, 2, 3))
    again = ColoredSchreierPoint.from_dict(point.to_dict())
    assert again.colors == point.colors
    assert (again.graph.table == point.graph.table).all()


def test_regular_s3_coloring():
    fam = family_from_spec("sym:3")
    perms, _ = regular_action(fam)
    graph = schreier_graph(fam, perms)
    point = ColoredSchreierPoint(graph, (1, 2, 3, 1, 2, 3))
    for theta in find_automorphisms(graph, point.colors):
        if not theta.is_identity:
            check_witness(point, repetitive_witness(point, theta))


@st.composite
def transitive_actions(draw):
    n = draw(st.integers(1, 8))
    k = draw(st.integers(1, 2))
    perms = [draw(st.permutations(range(n))) for _ in range(k)]
    return k, perms


@settings(max_examples=150, deadline=None)
@given(transitive_actions(), st.data())
def test_nonrepetitive_points_have_no_fixed_point_free_symmetry(action, data):
    k, perms = action
    try:
        graph = schreier_graph(FreeGroup(k), perms)
    except NotTransitiveError:
        assume(False)
    colors = data.draw(st.lists(st.integers(1, 3), min_size=graph.n, max_size=graph.n))
    point = ColoredSchreierPoint(graph, colors, 3)
    simple = ColoredGraph(point.colored_graph().graph, colors, 3)
    free = [t for t in find_automorphisms(graph, colors) if not t.fixed_points]
    if verify_nonrepetitive(simple).ok:
        assert not free
    for theta in free:
        check_witness(point, repetitive_witness(point, theta))
