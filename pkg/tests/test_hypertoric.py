import itertools
import math
import random
from fractions import Fraction

import pytest

from qslice import hypertoric as ht
from qslice import linalg
from qslice import polyhedra as ph
from qslice.hypertoric import BOUNDED, MINUS, PLUS, SignVector


def upper(n, ell, w):
    return (n - 1) * (ell - 1) + w


def lower(n, ell):
    return -(n - 1) * (ell - 1)


def ordering_sign(order, lam_sign, n):
    """Sign vector with h_ij = + exactly when i comes before j."""
    pos = {v: k for k, v in enumerate(order)}
    names = ht.reduced_variables(n)
    signs = []
    for name in names:
        if name.startswith("h"):
            i, j = int(name[1]), int(name[2])
            signs.append(PLUS if pos[i] < pos[j] else MINUS)
        else:
            signs.append(lam_sign)
    return SignVector(names, tuple(signs))


# --- arrangement shape ------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_reduced_equations(n):
    arr = ht.build_reduced(n, 2, 1, 3)
    eqs = arr.equations
    assert len(eqs) == n
    m = linalg.as_matrix([a for a, _ in eqs])
    assert linalg.rank(m) == n
    assert len(arr.variables) - n == math.comb(n, 2)
    for i, (a, b) in enumerate(eqs, start=1):
        assert b == 3
        assert a[len(arr.pairs) + i - 1] == -1


def test_reduced_variable_order_is_canonical():
    arr = ht.build_reduced(3, 2, 1, 0)
    assert arr.variables == ("h12", "h13", "h23", "q1", "q2", "q3")


@pytest.mark.parametrize("n,ell,w", [(2, 2, 1), (3, 2, 2), (3, 3, 1)])
def test_full_arrangement_shape(n, ell, w):
    arr = ht.build_full(ht.minimal_slice(n, ell, w), 1)
    arrows = [v for v in arr.variables if v.startswith("v")]
    frames = [v for v in arr.variables if v.startswith("q")]
    assert len(arrows) == math.comb(n, 2) * 2 * (ell - 1)
    assert len(frames) == n * w
    assert len(arr.equations) == n


def test_non_integral_parameter_leaves_framing_unsigned():
    arr = ht.build_reduced(3, 2, 1, Fraction(1, 2))
    assert arr.signed_variables == ("h12", "h13", "h23")


def test_lift_lands_on_the_equations():
    arr = ht.build_reduced(3, 2, 1, 4)
    rng = random.Random(3)
    for _ in range(20):
        h = [rng.randint(-5, 5) for _ in arr.pairs]
        x = arr.lift(h)
        for a, b in arr.equations:
            assert sum(c * v for c, v in zip(a, x)) == b


# --- chambers ---------------------------------------------------------------


def test_classify_example_n2():
    arr = ht.build_reduced(2, 2, 1, 2)
    found = ht.enumerate_bounded(arr)
    assert len(found) == 2
    assert sorted(ht.chamber_to_ordering(c.sign, 2) for c in found) == [(1, 2), (2, 1)]


def test_example_ordering_3124():
    n, ell, w = 4, 2, 1
    lam = upper(n, ell, w)
    sign = ordering_sign((3, 1, 2, 4), MINUS, n)
    ch = ht.chamber_status(ht.build_reduced(n, ell, w, lam), sign)
    assert ch.status == BOUNDED
    assert ch.lattice
    assert ht.chamber_to_ordering(sign, n) == (3, 1, 2, 4)
    # a cyclic pattern has no ordering
    bad = ordering_sign((1, 2, 3, 4), MINUS, n).as_dict()
    bad["h13"] = MINUS
    with pytest.raises(ValueError):
        ht.chamber_to_ordering(SignVector.from_dict(ht.reduced_variables(n), bad), n)


CASES = [(n, ell, w) for n in (2, 3) for ell in (2, 3) for w in (1, 2)]


@pytest.mark.parametrize("n,ell,w", CASES)
def test_framing_signs_forced(n, ell, w):
    for lam in range(lower(n, ell) - 2, upper(n, ell, w) + 3):
        for ch in ht.enumerate_bounded(ht.build_reduced(n, ell, w, lam)):
            qs = {ch.sign[f"q{i}"] for i in range(1, n + 1)}
            assert qs == ({MINUS} if lam >= 1 else {PLUS})


@pytest.mark.parametrize("n,ell,w", CASES)
def test_bounded_chambers_have_lattice_points(n, ell, w):
    for lam in (lower(n, ell) - 1, lower(n, ell), upper(n, ell, w), upper(n, ell, w) + 1):
        arr = ht.build_reduced(n, ell, w, lam)
        found = ht.enumerate_bounded(arr, lattice="all")
        assert len(found) == math.factorial(n)
        for ch in found:
            assert ch.lattice
            for pt in ch.lattice:
                assert arr.satisfies(pt, ch.sign)


@pytest.mark.parametrize("n,ell,w", CASES)
def test_pruning_does_not_change_result(n, ell, w):
    for lam in range(lower(n, ell) - 1, upper(n, ell, w) + 2):
        arr = ht.build_reduced(n, ell, w, lam)
        a = [c.sign for c in ht.enumerate_bounded(arr)]
        b = [c.sign for c in ht.enumerate_bounded(arr, prune=True)]
        assert a == b


def test_result_independent_of_evaluation_order():
    arr = ht.build_reduced(3, 2, 2, -4)
    signs = ht.all_sign_vectors(arr)
    random.Random(9).shuffle(signs)
    shuffled = sorted(ht._worker((arr, signs, None, "witness")), key=lambda c: c.sign.sort_key())
    assert [c.sign for c in shuffled] == [c.sign for c in ht.enumerate_bounded(arr)]


def test_parallel_matches_serial():
    arr = ht.build_reduced(3, 2, 1, 5)
    assert ht.enumerate_bounded(arr, jobs=2) == ht.enumerate_bounded(arr, jobs=1)


def test_status_agrees_with_polyhedra():
    arr = ht.build_reduced(3, 2, 1, -3)
    for sv in ht.all_sign_vectors(arr):
        p = arr.polyhedron(sv)
        ch = ht.chamber_status(arr, sv, method="both", lattice="none")
        if not ph.is_feasible(p, "simplex"):
            assert ch.status == ht.EMPTY
        elif ph.is_bounded(p, "simplex"):
            assert ch.status == BOUNDED
        else:
            assert ch.status == ht.UNBOUNDED


def test_crosschecked_enumeration():
    arr = ht.build_reduced(3, 3, 1, 4)
    assert ht.enumerate_bounded(arr, method="both") == ht.enumerate_bounded(arr, method="simplex")


@pytest.mark.parametrize("lam", ["1/2", "-3/2", "7/3"])
def test_non_integral_lambda_has_no_bounded_chambers(lam):
    for n in (2, 3):
        assert ht.enumerate_bounded(ht.build_reduced(n, 2, 1, lam)) == []
        assert ht.reference_count(n, 2, 1, lam) == 0
    assert ht.enumerate_bounded(ht.build_full(ht.minimal_slice(2, 2, 1), lam), lattice="none") == []


def test_reference_count():
    assert ht.reference_count(3, 2, 1, 3) == 6
    assert ht.reference_count(3, 2, 1, 2) == 0
    assert ht.reference_count(3, 2, 1, -2) == 6
    assert ht.reference_count(3, 2, 1, -1) == 0


# --- reduction, orderings, symmetric group ----------------------------------


@pytest.mark.parametrize("ell,w", [(2, 1), (3, 2)])
def test_full_reduces_bijectively(ell, w):
    n = 2
    for lam in (lower(n, ell) - 1, upper(n, ell, w) + 1, 1):
        full = ht.enumerate_bounded(ht.build_full(ht.minimal_slice(n, ell, w), lam))
        red = ht.enumerate_bounded(ht.build_reduced(n, ell, w, lam))
        images = [ht.reduce_chamber(c) for c in full]
        assert sorted(s.signs for s in images) == sorted(c.sign.signs for c in red)
        assert len(set(images)) == len(images)


def test_full_points_project_into_reduced_chamber():
    n, ell, w, lam = 2, 2, 1, 3
    full = ht.build_full(ht.minimal_slice(n, ell, w), lam)
    red = ht.build_reduced(n, ell, w, lam)
    for ch in ht.enumerate_bounded(full, lattice="all"):
        target = ht.reduce_chamber(ch)
        for pt in ch.lattice:
            assert red.satisfies(full.project(pt), target)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sn_action_intertwines(n):
    ell, w = 2, 1
    arr = ht.build_reduced(n, ell, w, upper(n, ell, w))
    found = ht.enumerate_bounded(arr, lattice="none")
    signs = {c.sign for c in found}
    orders = {ht.chamber_to_ordering(c.sign, n) for c in found}
    assert orders == set(itertools.permutations(range(1, n + 1)))
    for sigma in itertools.permutations(range(1, n + 1)):
        for s in signs:
            moved = ht.sn_act(sigma, s)
            assert moved in signs
            assert ht.chamber_to_ordering(moved, n) == ht.compose(sigma, ht.chamber_to_ordering(s, n))


def test_sn_act_validates():
    s = ordering_sign((1, 2), PLUS, 2)
    with pytest.raises(ValueError):
        ht.sn_act((1, 1), s)


def test_report_shape():
    arr = ht.build_reduced(2, 2, 1, 2)
    rep = ht.report(arr, ht.enumerate_bounded(arr, lattice="all"))
    assert rep["count"] == rep["expected"] == 2
    assert rep["lambda"] == "2"
    first = rep["chambers"][0]
    assert set(first) == {"signs", "status", "ordering", "lattice_points"}
    assert first["signs"] == {"h12": "+", "q1": "-", "q2": "-"}


def test_rejects_bad_sizes():
    with pytest.raises(ValueError):
        ht.build_reduced(1, 2, 1, 0)
    with pytest.raises(ValueError):
        ht.build_reduced(3, 1, 1, 0)
