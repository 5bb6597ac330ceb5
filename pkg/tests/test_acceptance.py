"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction

import pytest

from qslice import hypertoric as ht
from qslice import modelgeom as mg
from qslice import polyhedra as ph
from qslice import strata as st
from qslice.rootlat import FramedSetting

RESULTS: dict[int, str] = {}


def record(num: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {num} ({title}): {detail}"
    RESULTS[num] = line
    print(line)


def upper(n, ell, w):
    return (n - 1) * (ell - 1) + w


def lower(n, ell):
    return -(n - 1) * (ell - 1)


# ---------------------------------------------------------------------------


def criterion_1():
    start = time.perf_counter()
    bad, cases = [], 0
    for n, ell, w in itertools.product((2, 3, 4), (2, 3), (1, 2)):
        lams = [Fraction(x) for x in range(lower(n, ell) - 2, upper(n, ell, w) + 3)]
        lams += [Fraction(lower(n, ell) * 2 - 3, 2), Fraction(1, 2), Fraction(upper(n, ell, w) * 3 + 1, 3)]
        for lam in lams:
            got = len(ht.enumerate_bounded(ht.build_reduced(n, ell, w, lam)))
            want = ht.reference_count(n, ell, w, lam)
            cases += 1
            if got != want:
                bad.append((n, ell, w, str(lam), got, want))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 120
    return ok, f"{cases} cases, {len(bad)} mismatches {bad[:3]}, {elapsed:.1f}s"


def criterion_2():
    start = time.perf_counter()
    settings = [(2, ell, w) for ell in (2, 3) for w in (1, 2)] + [(3, 2, 1)]
    bad, cases = [], 0
    for n, ell, w in settings:
        sl = ht.minimal_slice(n, ell, w)
        for lam in (upper(n, ell, w) - 1, upper(n, ell, w) + 1, lower(n, ell) - 1, lower(n, ell) + 1):
            full = ht.enumerate_bounded(ht.build_full(sl, lam), lattice="witness")
            red = ht.enumerate_bounded(ht.build_reduced(n, ell, w, lam), lattice="witness")
            images = [ht.reduce_chamber(c) for c in full]
            bijective = (
                len(set(images)) == len(images)
                and sorted(s.as_dict().items() for s in images) == sorted(c.sign.as_dict().items() for c in red)
            )
            cases += 1
            if len(full) != len(red) or not bijective:
                bad.append((n, ell, w, lam, len(full), len(red)))
    elapsed = time.perf_counter() - start
    return not bad and elapsed < 60, f"{cases} cases, {len(bad)} mismatches {bad[:3]}, {elapsed:.1f}s"


def criterion_3():
    bad = []
    for n, ell, w in itertools.product((2, 3, 4), (2, 3), (1, 2)):
        found = ht.enumerate_bounded(ht.build_reduced(n, ell, w, upper(n, ell, w)), lattice="none")
        orders = [ht.chamber_to_ordering(c.sign, n) for c in found]
        if sorted(orders) != sorted(itertools.permutations(range(1, n + 1))):
            bad.append((n, ell, w, "ordering"))
            continue
        signs = {c.sign for c in found}
        for sigma in itertools.permutations(range(1, n + 1)):
            for c, order in zip(found, orders):
                moved = ht.sn_act(sigma, c.sign)
                if moved not in signs or ht.chamber_to_ordering(moved, n) != ht.compose(sigma, order):
                    bad.append((n, ell, w, sigma))
                    break
    return not bad, f"12 settings, failures {bad[:3]}"


def criterion_4():
    flat_bad = [
        (n, ell, w)
        for n, ell, w in itertools.product((1, 2, 3), (2, 3), (1, 2))
        if not st.moment_map_flat(FramedSetting.flower(ell, n, w))
    ]
    types = st.enumerate_rep_types(FramedSetting.flower(2, 2, 1))
    dims = {str(t): st.stratum_dim(t) for t in types}
    open_dim = st.stratum_dim(st.flower_type(st.FlowerLeafSpec.open_leaf(2, 2, 1)))
    min_dim = st.stratum_dim(st.flower_type(st.FlowerLeafSpec.minimal(2, 2, 1)))
    ok = not flat_bad and len(types) == 5 and open_dim == 12 and min_dim == 8
    detail = (
        f"flat failures {flat_bad}; {len(types)} types (want 5), dims {sorted(dims.values(), reverse=True)}; "
        f"open {open_dim}, minimal {min_dim}"
    )
    return ok, detail


def criterion_5():
    bad = []
    for n, ell, w in itertools.product(range(1, 6), (2, 3), (1, 2)):
        types = st.enumerate_rep_types(FramedSetting.flower(ell, n, w))
        tau = st.flower_type(st.FlowerLeafSpec.minimal(n, ell, w))
        c = st.min_boundary_codim(tau, types)
        if c is not None and c < 4:  # None: nothing below the leaf
            bad.append(("minimal", n, ell, w, c))
    for n, w in itertools.product(range(2, 6), (1, 2)):
        spec = st.FlowerLeafSpec(n, 2, w, 0, (1,) * (n - 2) + (2,))
        tau = st.flower_type(spec)
        types = st.enumerate_rep_types(FramedSetting.flower(2, n, w))
        if st.stratum_dim(tau) != 2 * n * 2 + 4 * 2 - 6 or st.min_boundary_codim(tau, types) != 2:
            bad.append(("remark", n, w, st.stratum_dim(tau), st.min_boundary_codim(tau, types)))
    return not bad, f"failures {bad[:3]}"


def criterion_6():
    start = time.perf_counter()
    counts = {}
    for ell in (2, 3, 4):
        rng = random.Random(6000 + ell)
        good = 0
        for _ in range(50):
            p = mg.random_leaf_point(ell, rng)
            m = mg.transition_matrix(p)
            good += (
                mg.is_darboux(mg.frame_I(p))
                and mg.is_darboux(mg.frame_J(p))
                and m == mg.closed_form(p)
                and mg.is_unipotent(m)
                and mg.is_strictly_upper(m)
            )
        counts[ell] = good
    elapsed = time.perf_counter() - start
    ok = all(v == 50 for v in counts.values()) and elapsed < 10
    return ok, f"passing points per ell {counts} of 50, {elapsed:.1f}s"


def random_system(rng):
    n = rng.randint(1, 6)
    eqs, ineqs = [], []
    for _ in range(rng.randint(1, 12)):
        a = tuple(rng.randint(-3, 3) for _ in range(n))
        b = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
        (eqs if rng.random() < 0.15 else ineqs).append((a, b))
    return ph.Polyhedron(n, tuple(eqs), tuple(ineqs))


def criterion_7():
    rng = random.Random(7)
    bad, feasible, bounded = [], 0, 0
    for i in range(200):
        p = random_system(rng)
        f1, f2 = ph.fm_is_feasible(p), ph.simplex_is_feasible(p)
        b1, b2 = ph.fm_is_bounded(p), ph.simplex_is_bounded(p)
        feasible += f2
        bounded += f2 and b2
        if f1 != f2 or b1 != b2:
            bad.append(i)
    return not bad, f"200 systems ({feasible} feasible, {bounded} bounded nonempty), disagreements {bad}"


CRITERIA = {
    1: ("chamber counts", criterion_1),
    2: ("reduced/full bijection", criterion_2),
    3: ("orderings and S_n action", criterion_3),
    4: ("flatness and stratification", criterion_4),
    5: ("boundary codimension", criterion_5),
    6: ("model geometry", criterion_6),
    7: ("polyhedral redundancy", criterion_7),
}


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num):
    title, fn = CRITERIA[num]
    ok, detail = fn()
    record(num, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num in sorted(CRITERIA):
        title, fn = CRITERIA[num]
        ok, detail = fn()
        record(num, title, ok, detail)
        failed += not ok
    raise SystemExit(1 if failed else 0)
