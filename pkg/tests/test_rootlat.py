import itertools
import random
from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qslice.rootlat import (
    DimVector,
    FramedSetting,
    Quiver,
    extend,
    is_positive_root,
    p_form,
    positive_roots_below,
    tits_form,
)


def make_quiver(loops, edges):
    """loops[i] loops at vertex i, edges[(i, j)] arrows i -> j."""
    verts = [str(i) for i in range(len(loops))]
    arrows = []
    for i, c in enumerate(loops):
        arrows += [(verts[i], verts[i])] * c
    for (i, j), c in edges.items():
        arrows += [(verts[i], verts[j])] * c
    return Quiver(tuple(verts), tuple(arrows))


def small_quivers(max_vertices=3):
    for n in range(1, max_vertices + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for loops in itertools.product(range(3), repeat=n):
            for counts in itertools.product(range(3), repeat=len(pairs)):
                yield loops, dict(zip(pairs, counts))


# --- independent oracle ----------------------------------------------------


def oracle_form(loops, edges, a, b):
    n = len(loops)
    total = 0
    for i in range(n):
        total += 2 * a[i] * b[i] * (1 - loops[i])
    for (i, j), c in edges.items():
        total -= c * (a[i] * b[j] + a[j] * b[i])
    return total


def oracle_connected(loops, edges, x):
    supp = {i for i, v in enumerate(x) if v}
    if not supp:
        return False
    start = next(iter(supp))
    seen, todo = {start}, [start]
    while todo:
        i = todo.pop()
        for (a, b), c in edges.items():
            if c == 0:
                continue
            for u, v in ((a, b), (b, a)):
                if u == i and v in supp and v not in seen:
                    seen.add(v)
                    todo.append(v)
    return seen == supp


def oracle_is_root(loops, edges, beta, cap):
    """Breadth-first search over the Weyl orbit of ``beta`` inside the box of
    nonnegative vectors with height <= cap."""
    n = len(loops)
    free = [i for i in range(n) if loops[i] == 0]

    def e(i):
        return tuple(1 if k == i else 0 for k in range(n))

    def refl(x, i):
        c = oracle_form(loops, edges, x, e(i))  # (e_i, e_i) = 2 at loop-free i
        return tuple(x[k] - (c if k == i else 0) for k in range(n))

    beta = tuple(beta)
    seen, todo = {beta}, deque([beta])
    while todo:
        x = todo.popleft()
        if sum(x) == 1:
            return True  # simple roots, loop vertex or not
        if oracle_connected(loops, edges, x) and all(
            oracle_form(loops, edges, x, e(i)) <= 0 for i in free if x[i]
        ):
            return True
        for i in free:
            y = refl(x, i)
            if min(y) >= 0 and sum(y) <= cap and y not in seen:
                seen.add(y)
                todo.append(y)
    return False


def test_roots_match_bfs_oracle():
    rng = random.Random(11)
    quivers = [q for q in small_quivers() if len(q[0]) < 3]
    three = [q for q in small_quivers() if len(q[0]) == 3]
    quivers += rng.sample(three, 60)
    checked = 0
    for loops, edges in quivers:
        q = make_quiver(loops, edges)
        n = len(loops)
        for beta in itertools.product(range(7), repeat=n):
            if not 0 < sum(beta) <= 6:
                continue
            want = oracle_is_root(loops, edges, beta, cap=sum(beta))
            assert is_positive_root(q, DimVector(q.vertices, beta)) == want, (loops, edges, beta)
            checked += 1
    assert checked > 5000


def test_form_matches_oracle_on_small_quivers():
    rng = random.Random(5)
    for loops, edges in itertools.islice(small_quivers(), 0, None, 7):
        q = make_quiver(loops, edges)
        n = len(loops)
        a = [rng.randint(0, 4) for _ in range(n)]
        b = [rng.randint(0, 4) for _ in range(n)]
        assert tits_form(q, DimVector(q.vertices, a), DimVector(q.vertices, b)) == oracle_form(loops, edges, a, b)


# --- properties ------------------------------------------------------------


@st.composite
def quiver_and_vectors(draw, count=3):
    loops = draw(st.lists(st.integers(0, 3), min_size=1, max_size=4))
    n = len(loops)
    edges = {p: draw(st.integers(0, 3)) for p in itertools.combinations(range(n), 2)}
    q = make_quiver(loops, edges)
    vecs = [DimVector(q.vertices, draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))) for _ in range(count)]
    return q, vecs


@given(quiver_and_vectors())
def test_tits_form_symmetric_and_bilinear(data):
    q, (a, b, c) = data
    assert tits_form(q, a, b) == tits_form(q, b, a)
    assert tits_form(q, a + b, c) == tits_form(q, a, c) + tits_form(q, b, c)
    assert tits_form(q, a * 3, b) == 3 * tits_form(q, a, b)


@given(quiver_and_vectors(count=1))
def test_self_pairing_even_and_p_integral(data):
    q, (a,) = data
    assert tits_form(q, a, a) % 2 == 0
    p = p_form(q, a)
    assert isinstance(p, int)
    assert p == 1 - tits_form(q, a, a) // 2


@pytest.mark.parametrize("ell", [2, 3, 4])
def test_flower_p_values(ell):
    q = Quiver.flower(ell)
    for n in range(1, 11):
        assert p_form(q, DimVector.on(q, [n])) == 1 + n * n * (ell - 1)


@pytest.mark.parametrize("ell,w,n", [(2, 1, 2), (2, 2, 3), (3, 1, 2), (3, 2, 4)])
def test_extended_flower_pairings(ell, w, n):
    qx, v = extend(FramedSetting.flower(ell, n, w))
    a = DimVector.on(qx, {"0": 1})
    inf = DimVector.on(qx, {"inf": 1})
    assert v.as_dict() == {"0": n, "inf": 1}
    assert tits_form(qx, a, a) == 2 - 2 * ell
    assert tits_form(qx, a, inf) == -w
    for k in range(1, n + 1):
        assert p_form(qx, inf + a * k) == k * k * (ell - 1) + k * w


@settings(max_examples=40, deadline=None)
@given(quiver_and_vectors(count=1))
def test_roots_below_closed_and_contain_simples(data):
    q, (bound,) = data
    roots = positive_roots_below(q, bound)
    assert all(r.leq(bound) for r in roots)
    assert len(set(roots)) == len(roots)
    for v in q.vertices:
        e = DimVector.simple(q, v)
        if e.leq(bound):
            assert e in roots


def test_known_roots_of_a2_and_jordan():
    a2 = make_quiver([0, 0], {(0, 1): 1})
    got = {r.values for r in positive_roots_below(a2, DimVector(a2.vertices, (3, 3)))}
    assert got == {(1, 0), (0, 1), (1, 1)}
    jordan = Quiver.flower(1)
    assert [r.values for r in positive_roots_below(jordan, DimVector.on(jordan, [4]))] == [(1,), (2,), (3,), (4,)]


def test_extended_flower_roots_below_inf_plus_two_alpha():
    qx, bound = extend(FramedSetting.flower(2, 2, 1))
    got = {(r["0"], r["inf"]) for r in positive_roots_below(qx, bound)}
    assert got == {(1, 0), (2, 0), (0, 1), (1, 1), (2, 1)}


def test_quiver_rejects_unknown_endpoint():
    with pytest.raises(ValueError):
        Quiver(("a",), (("a", "b"),))


def test_quiver_json_round_trip():
    q = Quiver.flower(3)
    assert Quiver.from_json(q.to_json()) == q
