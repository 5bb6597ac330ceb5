"""Exact polyhedra ``{x : E x = f, A x <= b}`` over the rationals.

Two independent engines decide feasibility and boundedness:

* Fourier-Motzkin elimination with Chernikov's history rule and parallel-row
  dominance pruning;
* a two-phase dense simplex on ``Fraction`` tableaux with Bland's rule.

``method="both"`` (or ``QS_CROSSCHECK=1`` in the environment) runs both and
raises :class:`CrossCheckError` when they disagree.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor, gcd
from typing import Iterator, Mapping, Sequence

from .exact import fmt, to_rational
from . import linalg

log = logging.getLogger(__name__)

Row = tuple[tuple[Fraction, ...], Fraction]


class CrossCheckError(RuntimeError):
    """Two independent decision procedures returned different verdicts."""


def _crosscheck_default() -> bool:
    return os.environ.get("QS_CROSSCHECK", "") not in ("", "0")


@dataclass(frozen=True)
class Polyhedron:
    num_vars: int
    equalities: tuple[Row, ...] = ()
    inequalities: tuple[Row, ...] = ()

    def __post_init__(self) -> None:
        eqs = tuple(_row(r, self.num_vars) for r in self.equalities)
        ineqs = tuple(_row(r, self.num_vars) for r in self.inequalities)
        object.__setattr__(self, "equalities", eqs)
        object.__setattr__(self, "inequalities", ineqs)

    def contains(self, x: Sequence) -> bool:
        x = [to_rational(v) for v in x]
        for a, b in self.equalities:
            if _dot(a, x) != b:
                return False
        return all(_dot(a, x) <= b for a, b in self.inequalities)

    def to_json(self) -> dict:
        def enc(rows):
            return [{"coeffs": [fmt(c) for c in a], "rhs": fmt(b)} for a, b in rows]

        return {
            "num_vars": self.num_vars,
            "equalities": enc(self.equalities),
            "inequalities": enc(self.inequalities),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Polyhedron":
        def dec(rows):
            return tuple(
                (tuple(to_rational(c) for c in r["coeffs"]), to_rational(r["rhs"])) for r in rows
            )

        return cls(int(data["num_vars"]), dec(data.get("equalities", ())), dec(data.get("inequalities", ())))


def _row(r, n: int) -> Row:
    a, b = r
    a = tuple(to_rational(c) for c in a)
    if len(a) != n:
        raise ValueError(f"row has {len(a)} coefficients, expected {n}")
    return a, to_rational(b)


def _dot(a: Sequence[Fraction], x: Sequence[Fraction]) -> Fraction:
    return sum((ai * xi for ai, xi in zip(a, x) if ai), Fraction(0))


# ---------------------------------------------------------------------------
# Fourier-Motzkin
#
# Internally rows are primitive integer vectors: (coeffs, rhs) with
# gcd(coeffs) = 1, rhs a Fraction.  Scaling by a positive number does not
# change the half-space, so parallel rows share a key.


def _normalize(a: Sequence[Fraction], b: Fraction) -> tuple[tuple[int, ...], Fraction] | None:
    """Primitive form of ``a x <= b``; ``None`` for a trivially true row.

    Raises ``_Infeasible`` for ``0 <= b`` with ``b < 0``."""
    den = 1
    for c in a:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in a]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if g == 0:
        if b < 0:
            raise _Infeasible
        return None
    return tuple(c // g for c in ints), b * den / g


class _Infeasible(Exception):
    pass


@dataclass
class _FMSystem:
    """Inequalities grouped by primitive direction.

    Each direction keeps the Pareto front of ``(rhs, history)`` pairs: an
    entry is dropped only when another parallel row is at least as tight
    *and* has a history that is a subset of its own.  Plain "keep the
    tightest" would discard rows Chernikov's rule later relies on."""

    n: int
    rows: dict  # coeffs -> list of (rhs, history frozenset)
    eliminated: int = 0

    @classmethod
    def from_rows(cls, n: int, rows: Sequence[Row]) -> "_FMSystem":
        sys = cls(n, {})
        for i, (a, b) in enumerate(rows):
            sys.add(a, b, frozenset((i,)))
        return sys

    def add(self, a, b, hist) -> None:
        norm = _normalize(a, b)
        if norm is None:
            return
        self._insert(*norm, hist)

    def _insert(self, key, rhs, hist) -> None:
        front = self.rows.setdefault(key, [])
        for r, h in front:
            if r <= rhs and h <= hist:
                return
        front[:] = [(r, h) for r, h in front if not (rhs <= r and hist <= h)]
        front.append((rhs, hist))

    def items(self):
        for key, front in self.rows.items():
            for rhs, hist in front:
                yield key, rhs, hist

    def tightest(self):
        """Direction -> smallest right-hand side."""
        return {key: min(r for r, _ in front) for key, front in self.rows.items()}

    def eliminate(self, j: int) -> "_FMSystem":
        pos, neg, out = [], [], _FMSystem(self.n, {}, self.eliminated + 1)
        for key, rhs, hist in self.items():
            c = key[j]
            if c > 0:
                pos.append((key, rhs, hist))
            elif c < 0:
                neg.append((key, rhs, hist))
            else:
                out._insert(key, rhs, hist)
        limit = out.eliminated + 1
        for kp, bp, hp in pos:
            for kn, bn, hn in neg:
                hist = hp | hn
                if len(hist) > limit:
                    # Chernikov: such a combination is implied by others
                    continue
                cp, cn = kp[j], -kn[j]
                a = [Fraction(cn * x + cp * y) for x, y in zip(kp, kn)]
                out.add(a, cn * bp + cp * bn, hist)
        return out

    def cost(self, j: int) -> int:
        p = sum(1 for key, _, _ in self.items() if key[j] > 0)
        q = sum(1 for key, _, _ in self.items() if key[j] < 0)
        return p * q - p - q


def _substitute_equalities(p: Polyhedron, keep: frozenset[int] = frozenset()) -> tuple[list[Row], set[int]] | None:
    """Eliminate equalities by substitution.

    Returns the resulting inequality rows (still over all ``num_vars``
    coordinates, substituted ones having zero coefficient) and the set of
    coordinates that were solved for.  ``None`` if the equalities are
    inconsistent.  Variables in ``keep`` are never solved for."""
    eqs = [(list(a), b) for a, b in p.equalities]
    ineqs = [(list(a), b) for a, b in p.inequalities]
    solved: set[int] = set()
    while eqs:
        a, b = eqs.pop()
        if not any(a):
            if b != 0:
                return None
            continue
        cands = [i for i, c in enumerate(a) if c and i not in keep]
        if not cands:
            ineqs.append((a, b))
            ineqs.append(([-c for c in a], -b))
            continue
        j = cands[0]
        piv = a[j]
        a = [c / piv for c in a]
        b = b / piv

        def sub(rows):
            res = []
            for r, rb in rows:
                f = r[j]
                if f:
                    r = [x - f * y for x, y in zip(r, a)]
                    rb = rb - f * b
                res.append((r, rb))
            return res

        eqs = sub(eqs)
        ineqs = sub(ineqs)
        solved.add(j)
    return [(tuple(a), b) for a, b in ineqs], solved


def fm_eliminate(p: Polyhedron, var_index: int) -> Polyhedron:
    """Project out one coordinate; the result has ``num_vars - 1`` variables."""
    if not 0 <= var_index < p.num_vars:
        raise IndexError("variable index out of range")
    j = var_index
    eqs = [r for r in p.equalities]
    ineqs = [r for r in p.inequalities]
    piv = next((r for r in eqs if r[0][j] != 0), None)
    if piv is not None:
        pa, pb = piv
        scale = 1 / pa[j]
        pa = tuple(c * scale for c in pa)
        pb = pb * scale

        def sub(r):
            a, b = r
            f = a[j]
            if not f:
                return r
            return tuple(x - f * y for x, y in zip(a, pa)), b - f * pb

        eqs = [sub(r) for r in eqs if r is not piv]
        ineqs = [sub(r) for r in ineqs]
        return _drop(p.num_vars, j, eqs, ineqs)
    try:
        sys = _FMSystem.from_rows(p.num_vars, ineqs)
        # a single step never triggers Chernikov pruning with singleton histories
        sys = sys.eliminate(j)
    except _Infeasible:
        return _infeasible_marker(p.num_vars - 1)
    rows = [(tuple(Fraction(c) for c in k), rhs) for k, rhs in sorted(sys.tightest().items())]
    return _drop(p.num_vars, j, eqs, rows)


def _drop(n: int, j: int, eqs, ineqs) -> Polyhedron:
    def cut(r):
        a, b = r
        return a[:j] + a[j + 1:], b

    out_e, out_i = [], []
    for r in eqs:
        a, b = cut(r)
        if any(a):
            out_e.append((a, b))
        elif b != 0:
            return _infeasible_marker(n - 1)
    for r in ineqs:
        a, b = cut(r)
        if any(a):
            out_i.append((a, b))
        elif b < 0:
            return _infeasible_marker(n - 1)
    return Polyhedron(n - 1, tuple(out_e), tuple(out_i))


def _infeasible_marker(n: int) -> Polyhedron:
    return Polyhedron(n, (), (((Fraction(0),) * n, Fraction(-1)),))


def _fm_project(p: Polyhedron, keep: Sequence[int]) -> _FMSystem | None:
    """Project onto the coordinates in ``keep``; ``None`` if infeasible."""
    keep_set = frozenset(keep)
    sub = _substitute_equalities(p, keep_set)
    if sub is None:
        return None
    rows, solved = sub
    try:
        sys = _FMSystem.from_rows(p.num_vars, rows)
        todo = [i for i in range(p.num_vars) if i not in keep_set and i not in solved]
        while todo:
            j = min(todo, key=sys.cost)
            todo.remove(j)
            sys = sys.eliminate(j)
    except _Infeasible:
        return None
    return sys


def fm_is_feasible(p: Polyhedron) -> bool:
    return _fm_project(p, ()) is not None


def fm_interval(p: Polyhedron, j: int) -> tuple[Fraction | None, Fraction | None] | None:
    """Range of coordinate ``j`` over ``p`` as ``(lo, hi)``, ``None`` ends
    meaning unbounded; ``None`` overall if ``p`` is empty."""
    # Treat x_j as an extra variable y = x_j so equalities that pin x_j are
    # handled uniformly.
    n = p.num_vars
    e = [0] * (n + 1)
    e[j] = 1
    e[n] = -1
    ext = Polyhedron(
        n + 1,
        tuple((a + (Fraction(0),), b) for a, b in p.equalities) + ((tuple(Fraction(c) for c in e), Fraction(0)),),
        tuple((a + (Fraction(0),), b) for a, b in p.inequalities),
    )
    sys = _fm_project(ext, (n,))
    if sys is None:
        return None
    lo = hi = None
    for key, rhs in sys.tightest().items():
        c = key[n]
        if any(key[i] for i in range(n)):
            raise AssertionError("projection left a foreign coordinate")
        if c > 0:
            v = rhs / c
            hi = v if hi is None or v < hi else hi
        elif c < 0:
            v = rhs / c
            lo = v if lo is None or v > lo else lo
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


def fm_is_bounded(p: Polyhedron) -> bool:
    """Every coordinate has a finite FM interval.  Empty input: ``True``."""
    for j in range(p.num_vars):
        iv = fm_interval(p, j)
        if iv is None:
            return True
        if iv[0] is None or iv[1] is None:
            return False
    return True


# ---------------------------------------------------------------------------
# exact simplex


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


def _simplex_core(tab: list[list[Fraction]], basis: list[int], ncols: int) -> str:
    """Maximise the objective in the last row (stored as reduced costs).

    ``tab`` rows are ``[coeffs..., rhs]``; the final row holds ``-c`` style
    reduced costs so that a negative entry marks an improving column.
    Bland's rule: smallest improving column, smallest-index leaving basic."""
    m = len(tab) - 1
    while True:
        obj = tab[m]
        enter = next((c for c in range(ncols) if obj[c] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        for r in range(m):
            a = tab[r][enter]
            if a > 0:
                ratio = tab[r][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            return "unbounded"
        r = best[1]
        _pivot(tab, r, enter)
        basis[r] = enter


def _pivot(tab: list[list[Fraction]], r: int, col: int) -> None:
    """Gauss-Jordan pivot; tableau rows are sparse, so zeros are skipped."""
    piv = tab[r][col]
    row = [v / piv if v else v for v in tab[r]]
    tab[r] = row
    nz = [k for k, v in enumerate(row) if v]
    for i in range(len(tab)):
        f = tab[i][col]
        if i != r and f:
            t = tab[i]
            for k in nz:
                t[k] = t[k] - f * row[k]


def linprog_exact(c: Sequence, p: Polyhedron) -> LPResult:
    """Maximise ``c . x`` over ``p`` (free variables) exactly."""
    n = p.num_vars
    c = [to_rational(v) for v in c]
    # x = xp - xm, inequality slacks s >= 0; standard form rows with rhs >= 0.
    rows: list[tuple[list[Fraction], Fraction, bool]] = []
    for a, b in p.equalities:
        rows.append((list(a) + [-v for v in a], b, False))
    for a, b in p.inequalities:
        rows.append((list(a) + [-v for v in a], b, True))
    m = len(rows)
    nslack = sum(1 for r in rows if r[2])
    nstruct = 2 * n + nslack
    ncols = nstruct + m  # artificials
    tab: list[list[Fraction]] = []
    basis: list[int] = []
    si = 0
    for idx, (a, b, is_ineq) in enumerate(rows):
        row = a + [Fraction(0)] * (nslack + m) + [b]
        if is_ineq:
            row[2 * n + si] = Fraction(1)
            si += 1
        if row[-1] < 0:
            row = [-v for v in row]
        row[nstruct + idx] = Fraction(1)
        tab.append(row)
        basis.append(nstruct + idx)
    # phase 1: minimise sum of artificials == maximise -sum
    obj = [Fraction(0)] * (ncols + 1)
    for r in tab:
        for k in range(nstruct):
            obj[k] -= r[k]
        obj[-1] -= r[-1]
    tab.append(obj)
    _simplex_core(tab, basis, ncols)
    if tab[-1][-1] != 0:
        return LPResult("infeasible")
    # drive artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= nstruct:
            col = next((k for k in range(nstruct) if tab[r][k] != 0), None)
            if col is None:
                continue  # redundant row
            _pivot(tab, r, col)
            basis[r] = col
    # phase 2 on structural columns only
    keep = [r for r in range(m) if basis[r] < nstruct]
    tab2 = [tab[r][:nstruct] + [tab[r][-1]] for r in keep]
    basis2 = [basis[r] for r in keep]
    full_c = c + [-v for v in c] + [Fraction(0)] * nslack
    obj2 = [-v for v in full_c] + [Fraction(0)]
    for r, b in enumerate(basis2):
        f = obj2[b]
        if f:
            obj2 = [x - f * y for x, y in zip(obj2, tab2[r])]
    tab2.append(obj2)
    status = _simplex_core(tab2, basis2, nstruct)
    if status == "unbounded":
        return LPResult("unbounded")
    z = [Fraction(0)] * nstruct
    for r, b in enumerate(basis2):
        z[b] = tab2[r][-1]
    x = tuple(z[i] - z[n + i] for i in range(n))
    return LPResult("optimal", x, tab2[-1][-1])


def simplex_is_feasible(p: Polyhedron) -> bool:
    return linprog_exact([0] * p.num_vars, p).status != "infeasible"


def _cone_rows(p: Polyhedron) -> tuple[tuple[Fraction, ...], ...]:
    rows = [a for a, _ in p.inequalities]
    for a, _ in p.equalities:
        rows.append(a)
        rows.append(tuple(-v for v in a))
    return tuple(rows)


def _nonneg_feasible(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> bool:
    """Phase one of the simplex method for ``{z >= 0 : A z = b}``."""
    m = len(a[0]) if a else 0
    tab = []
    for row, rhs in zip(a, b):
        row = list(row)
        if rhs < 0:
            row, rhs = [-v for v in row], -rhs
        tab.append(row + [rhs])
    k = len(tab)
    # artificial columns are implicit: basis entries >= m refer to them
    ncols = m + k
    full = [r[:m] + [Fraction(int(i == j)) for j in range(k)] + [r[m]] for i, r in enumerate(tab)]
    obj = [Fraction(0)] * (ncols + 1)
    for r in full:
        for c in range(m):
            obj[c] -= r[c]
        obj[-1] -= r[-1]
    full.append(obj)
    basis = list(range(m, m + k))
    _simplex_core(full, basis, ncols)
    return full[-1][-1] == 0


@lru_cache(maxsize=1 << 16)
def _cone_trivial(n: int, rows: tuple[tuple[Fraction, ...], ...]) -> bool:
    """``{x : M x <= 0} = 0`` iff rank M = n and some ``y >= 1`` has
    ``M^T y = 0`` (a strictly positive dependency, by Stiemke/Gordan)."""
    if n == 0:
        return True
    if not rows or linalg.rank([list(r) for r in rows]) < n:
        return False
    m = len(rows)
    # y = 1 + z with z >= 0:  M^T z = -M^T 1
    a = [[rows[i][j] for i in range(m)] for j in range(n)]
    b = [-sum(col, Fraction(0)) for col in a]
    return _nonneg_feasible(a, b)


def recession_cone_trivial(p: Polyhedron) -> bool:
    """Whether the recession cone of ``p`` is ``{0}``; depends only on the
    constraint matrix, so results are cached across right-hand sides."""
    return _cone_trivial(p.num_vars, _cone_rows(p))


def simplex_is_bounded(p: Polyhedron) -> bool:
    if not simplex_is_feasible(p):
        return True
    return recession_cone_trivial(p)


# ---------------------------------------------------------------------------
# public verdicts


def _decide(name: str, p: Polyhedron, method: str | None, simplex_fn, fm_fn) -> bool:
    if method is None:
        method = "both" if _crosscheck_default() else "simplex"
    if method == "simplex":
        return simplex_fn(p)
    if method == "fm":
        return fm_fn(p)
    if method == "both":
        a, b = simplex_fn(p), fm_fn(p)
        if a != b:
            raise CrossCheckError(f"{name}: simplex={a} fm={b} on {p.to_json()}")
        return a
    raise ValueError(f"unknown method {method!r}")


def is_feasible(p: Polyhedron, method: str | None = None) -> bool:
    return _decide("is_feasible", p, method, simplex_is_feasible, fm_is_feasible)


def is_bounded(p: Polyhedron, method: str | None = None) -> bool:
    """Recession cone is trivial.  By convention an empty ``p`` is bounded."""
    return _decide("is_bounded", p, method, simplex_is_bounded, fm_is_bounded)


# ---------------------------------------------------------------------------
# lattice points


def _restrict(p: Polyhedron, value: int) -> Polyhedron:
    """Fix coordinate 0 to ``value`` and drop it."""
    v = Fraction(value)
    eqs = tuple((a[1:], b - a[0] * v) for a, b in p.equalities)
    ineqs = tuple((a[1:], b - a[0] * v) for a, b in p.inequalities)
    return _drop_trivial(p.num_vars - 1, eqs, ineqs)


def _drop_trivial(n: int, eqs, ineqs) -> Polyhedron | None:
    out_e, out_i = [], []
    for a, b in eqs:
        if any(a):
            out_e.append((a, b))
        elif b != 0:
            return None
    for a, b in ineqs:
        if any(a):
            out_i.append((a, b))
        elif b < 0:
            return None
    return Polyhedron(n, tuple(out_e), tuple(out_i))


def _points(p: Polyhedron | None) -> Iterator[tuple[int, ...]]:
    if p is None:
        return
    if p.num_vars == 0:
        yield ()
        return
    iv = fm_interval(p, 0)
    if iv is None:
        return
    lo, hi = iv
    if lo is None or hi is None:
        raise ValueError("lattice_points needs a bounded polyhedron")
    for k in range(ceil(lo), floor(hi) + 1):
        for rest in _points(_restrict(p, k)):
            yield (k,) + rest


def iter_lattice_points(p: Polyhedron) -> Iterator[tuple[int, ...]]:
    """Lazy lexicographic integer points of a bounded polyhedron."""
    if is_feasible(p, "fm") and not fm_is_bounded(p):
        raise ValueError("lattice_points needs a bounded polyhedron")
    return _points(p)


def lattice_points(p: Polyhedron) -> list[tuple[int, ...]]:
    """All integer points, in lexicographic order."""
    return list(iter_lattice_points(p))


def bounding_box(p: Polyhedron) -> list[tuple[Fraction, Fraction]] | None:
    box = []
    for j in range(p.num_vars):
        iv = fm_interval(p, j)
        if iv is None:
            return None
        if iv[0] is None or iv[1] is None:
            raise ValueError("unbounded polyhedron has no bounding box")
        box.append(iv)
    return box


__all__ = [
    "CrossCheckError",
    "LPResult",
    "Polyhedron",
    "bounding_box",
    "fm_eliminate",
    "fm_interval",
    "fm_is_bounded",
    "fm_is_feasible",
    "is_bounded",
    "iter_lattice_points",
    "is_feasible",
    "lattice_points",
    "linprog_exact",
    "recession_cone_trivial",
    "simplex_is_bounded",
    "simplex_is_feasible",
]
