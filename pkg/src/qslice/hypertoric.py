"""Chamber combinatorics for the quantized minimal-leaf slice.

Two arrangements live here.

* The *full* arrangement has one coordinate per non-loop arrow of the slice
  quiver.  Arrow ``t -> h`` has weight ``+1`` at ``h`` and ``-1`` at ``t``;
  framing arrows have weight ``-1`` at their vertex.  The moment equations
  ask the ``eta_i`` coefficient to equal ``r(lambda)_i = lambda``.
* The *reduced* arrangement groups the arrows into ``h_ij`` (``i < j``) and
  ``q_i`` and keeps ``-sum_j h_ij - q_i = lambda``.  Chambers are realised
  in ``h``-space after solving for ``q``.

A sign vector picks a half-space per integral coordinate.  For the full
arrangement ``+`` is ``x >= 0`` and ``-`` is ``x <= -1``.  For the reduced
one ``h_ij`` uses ``+/-(ell-1)`` and ``q_i`` uses ``0`` / ``-w``.

Integrality: for integral ``lambda`` we work on the all-integral orbit.  For
non-integral ``lambda`` we take the orbit on which every arrow between slice
vertices is integral and every framing coordinate lies in ``-lambda/w + Z``;
then only the between coordinates carry signs.
"""
from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import fmt, is_integral, to_rational
from .polyhedra import (
    CrossCheckError,
    Polyhedron,
    is_bounded,
    is_feasible,
    iter_lattice_points,
    lattice_points,
    recession_cone_trivial,
)
from .strata import FlowerLeafSpec, SliceQuiverData, flower_type, slice_quiver

log = logging.getLogger(__name__)

PLUS, MINUS = "+", "-"
EMPTY, BOUNDED, UNBOUNDED = "empty", "bounded", "unbounded"


def _flip(s: str) -> str:
    return MINUS if s == PLUS else PLUS


# ---------------------------------------------------------------------------
# sign vectors and chambers


@dataclass(frozen=True)
class SignVector:
    variables: tuple[str, ...]
    signs: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.variables) != len(self.signs):
            raise ValueError("one sign per variable")
        if any(s not in (PLUS, MINUS) for s in self.signs):
            raise ValueError("signs are '+' or '-'")

    @classmethod
    def from_dict(cls, variables: Sequence[str], data: dict) -> "SignVector":
        return cls(tuple(variables), tuple(data[v] for v in variables))

    def __getitem__(self, var: str) -> str:
        return self.signs[self.variables.index(var)]

    def get(self, var: str, default=None):
        try:
            return self[var]
        except ValueError:
            return default

    def as_dict(self) -> dict[str, str]:
        return dict(zip(self.variables, self.signs))

    def sort_key(self) -> tuple[int, ...]:
        return tuple(0 if s == PLUS else 1 for s in self.signs)

    def __str__(self) -> str:
        return " ".join(f"{v}{s}" for v, s in zip(self.variables, self.signs))


@dataclass(frozen=True)
class Chamber:
    kind: str  # "full" | "reduced"
    n: int
    sign: SignVector
    status: str
    lattice: tuple[tuple[int, ...], ...] | None = None
    coordinates: tuple[str, ...] = ()
    witness: tuple[int, ...] | None = None

    @property
    def bounded_nonempty(self) -> bool:
        return self.status == BOUNDED


# ---------------------------------------------------------------------------
# arrangements


def _h(i: int, j: int) -> str:
    return f"h{i}{j}"


def _q(i: int) -> str:
    return f"q{i}"


def _check_n(n: int) -> None:
    if not 2 <= n <= 9:
        raise ValueError("n must lie in 2..9 (single-digit vertex labels)")


@dataclass(frozen=True)
class ReducedArrangement:
    n: int
    ell: int
    w: int
    lam: Fraction

    def __post_init__(self) -> None:
        _check_n(self.n)
        if self.ell < 2 or self.w < 1:
            raise ValueError("need ell >= 2 and w >= 1")
        object.__setattr__(self, "lam", to_rational(self.lam))

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(itertools.combinations(range(1, self.n + 1), 2))

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(_h(i, j) for i, j in self.pairs) + tuple(_q(i) for i in range(1, self.n + 1))

    @property
    def integral(self) -> tuple[bool, ...]:
        qint = is_integral(self.lam)
        return tuple(True for _ in self.pairs) + tuple(qint for _ in range(self.n))

    @property
    def signed_variables(self) -> tuple[str, ...]:
        return tuple(v for v, ok in zip(self.variables, self.integral) if ok)

    @property
    def equations(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """``-sum_j h_ij - q_i = lambda`` over all variables, ``h_ji = -h_ij``."""
        pairs = self.pairs
        rows = []
        for i in range(1, self.n + 1):
            a = [Fraction(0)] * (len(pairs) + self.n)
            for k, (x, y) in enumerate(pairs):
                if x == i:
                    a[k] = Fraction(-1)
                elif y == i:
                    a[k] = Fraction(1)
            a[len(pairs) + i - 1] = Fraction(-1)
            rows.append((tuple(a), self.lam))
        return rows

    def q_affine(self, i: int) -> tuple[tuple[Fraction, ...], Fraction]:
        """``q_i = c . h + d`` on the solution space."""
        coeffs = []
        for x, y in self.pairs:
            coeffs.append(Fraction(-1) if x == i else Fraction(1) if y == i else Fraction(0))
        return tuple(coeffs), -self.lam

    def polyhedron(self, sign: SignVector) -> Polyhedron:
        """The chamber in ``h``-coordinates."""
        _check_sign(self.signed_variables, sign)
        m = len(self.pairs)
        ineqs = []
        t = Fraction(self.ell - 1)
        for k, (i, j) in enumerate(self.pairs):
            e = [Fraction(0)] * m
            if sign[_h(i, j)] == PLUS:
                e[k] = Fraction(-1)
            else:
                e[k] = Fraction(1)
            ineqs.append((tuple(e), -t))
        for i in range(1, self.n + 1):
            s = sign.get(_q(i))
            if s is None:
                continue
            c, d = self.q_affine(i)
            if s == PLUS:  # q >= 0  <=>  -c.h <= d
                ineqs.append((tuple(-x for x in c), d))
            else:  # q <= -w  <=>  c.h <= -w - d
                ineqs.append((c, -self.w - d))
        return Polyhedron(m, (), tuple(ineqs))

    def lift(self, h: Sequence) -> tuple[Fraction, ...]:
        """Full ``(h..., q...)`` coordinates of an ``h``-space point."""
        h = [to_rational(x) for x in h]
        qs = []
        for i in range(1, self.n + 1):
            c, d = self.q_affine(i)
            qs.append(sum((a * b for a, b in zip(c, h)), Fraction(0)) + d)
        return tuple(h) + tuple(qs)

    def satisfies(self, point: Sequence, sign: SignVector) -> bool:
        """Direct membership test on full reduced coordinates."""
        x = dict(zip(self.variables, (to_rational(v) for v in point)))
        for a, b in self.equations:
            if sum((c * x[v] for c, v in zip(a, self.variables)), Fraction(0)) != b:
                return False
        for v in self.signed_variables:
            if v.startswith("h"):
                ok = x[v] >= self.ell - 1 if sign[v] == PLUS else x[v] <= 1 - self.ell
            else:
                ok = x[v] >= 0 if sign[v] == PLUS else x[v] <= -self.w
            if not ok:
                return False
        return True

    def points(self, p: Polyhedron, mode: str = "all") -> tuple[tuple[int, ...], ...] | None:
        pts = _orbit_points(self.lam, p, mode)
        if pts is None:
            return None
        return tuple(tuple(int(v) for v in self.lift(pt)) for pt in pts)


@dataclass(frozen=True)
class FullArrangement:
    slice: SliceQuiverData
    lam: Fraction

    def __post_init__(self) -> None:
        if any(x != 1 for x in self.slice.v.values):
            raise ValueError("the full arrangement is defined for the minimal-leaf slice")
        _check_n(len(self.slice.quiver))
        object.__setattr__(self, "lam", to_rational(self.lam))

    @property
    def n(self) -> int:
        return len(self.slice.quiver)

    @property
    def w(self) -> int:
        ws = set(self.slice.w.values)
        if len(ws) != 1:
            raise ValueError("non-uniform framing")
        return ws.pop()

    @property
    def arrows(self) -> tuple[tuple[str, str, int], ...]:
        """``(tail, head, k)`` for each non-loop arrow, ``k`` counting repeats."""
        seen: dict[tuple[str, str], int] = {}
        out = []
        for t, h in self.slice.quiver.arrows:
            if t == h:
                continue
            k = seen.get((t, h), 0) + 1
            seen[(t, h)] = k
            out.append((t, h, k))
        return tuple(sorted(out, key=lambda a: (int(a[0]), int(a[1]), a[2])))

    @property
    def variables(self) -> tuple[str, ...]:
        names = [f"v{t}{h}_{k}" for t, h, k in self.arrows]
        for label, wi in zip(self.slice.quiver.vertices, self.slice.w.values):
            names += [f"q{label}_{m}" for m in range(1, wi + 1)]
        return tuple(names)

    @property
    def integral(self) -> tuple[bool, ...]:
        qint = is_integral(self.lam)
        return tuple(True if v.startswith("v") else qint for v in self.variables)

    @property
    def signed_variables(self) -> tuple[str, ...]:
        return tuple(v for v, ok in zip(self.variables, self.integral) if ok)

    @property
    def equations(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        labels = self.slice.quiver.vertices
        arrows = self.arrows
        nv = len(self.variables)
        rows = []
        for label in labels:
            a = [Fraction(0)] * nv
            for idx, (t, h, _) in enumerate(arrows):
                if h == label:
                    a[idx] += 1
                if t == label:
                    a[idx] -= 1
            for idx, name in enumerate(self.variables):
                if name.startswith(f"q{label}_"):
                    a[idx] = Fraction(-1)
            rows.append((tuple(a), self.lam))
        return rows

    def polyhedron(self, sign: SignVector) -> Polyhedron:
        _check_sign(self.signed_variables, sign)
        nv = len(self.variables)
        ineqs = []
        for idx, name in enumerate(self.variables):
            s = sign.get(name)
            if s is None:
                continue
            e = [Fraction(0)] * nv
            if s == PLUS:
                e[idx] = Fraction(-1)
                ineqs.append((tuple(e), Fraction(0)))
            else:
                e[idx] = Fraction(1)
                ineqs.append((tuple(e), Fraction(-1)))
        return Polyhedron(nv, tuple(self.equations), tuple(ineqs))

    def points(self, p: Polyhedron, mode: str = "all") -> tuple[tuple[int, ...], ...] | None:
        return _orbit_points(self.lam, p, mode)

    def project(self, point: Sequence) -> tuple[Fraction, ...]:
        """The map to reduced coordinates ``(h_ij..., q_i...)``."""
        x = dict(zip(self.variables, (to_rational(v) for v in point)))
        out = []
        for i, j in itertools.combinations(range(1, self.n + 1), 2):
            tot = Fraction(0)
            for t, h, k in self.arrows:
                if (t, h) == (str(i), str(j)):
                    tot += x[f"v{t}{h}_{k}"]
                elif (t, h) == (str(j), str(i)):
                    tot -= x[f"v{t}{h}_{k}"]
            out.append(tot)
        for i in range(1, self.n + 1):
            out.append(sum((x[v] for v in self.variables if v.startswith(f"q{i}_")), Fraction(0)))
        return tuple(out)


Arrangement = FullArrangement | ReducedArrangement

LATTICE_MODES = ("all", "witness", "none")


def _orbit_points(lam: Fraction, p: Polyhedron, mode: str) -> tuple[tuple[int, ...], ...] | None:
    """Integer points of a bounded chamber: all of them, the first one, or
    nothing.  Only the all-integral orbit (integral ``lambda``) has them."""
    if mode not in LATTICE_MODES:
        raise ValueError(f"lattice mode must be one of {LATTICE_MODES}")
    if mode == "none" or not is_integral(lam):
        return None
    if mode == "all":
        return tuple(lattice_points(p))
    first = next(iter_lattice_points(p), None)
    return () if first is None else (first,)


def _check_sign(signed: Sequence[str], sign: SignVector) -> None:
    if tuple(sign.variables) != tuple(signed):
        raise ValueError(f"sign vector must be total on {list(signed)}, got {list(sign.variables)}")


def build_reduced(n: int, ell: int, w: int, lam) -> ReducedArrangement:
    if n < 2:
        raise ValueError("n must be at least 2")
    return ReducedArrangement(n, ell, w, to_rational(lam))


def minimal_slice(n: int, ell: int, w: int) -> SliceQuiverData:
    return slice_quiver(flower_type(FlowerLeafSpec.minimal(n, ell, w)))


def build_full(sl: SliceQuiverData, lam) -> FullArrangement:
    """Full arrangement for the minimal-leaf slice, where ``r(lambda) = (lambda, ..., lambda)``."""
    return FullArrangement(sl, to_rational(lam))


def kind_of(arr: Arrangement) -> str:
    return "full" if isinstance(arr, FullArrangement) else "reduced"


# ---------------------------------------------------------------------------
# chamber evaluation


def _bounded_chamber(arr: Arrangement, sign: SignVector, p: Polyhedron, lattice: str) -> Chamber:
    pts = arr.points(p, lattice)
    witness = None
    if pts:
        witness = pts[0]
    return Chamber(
        kind_of(arr), arr.n, sign, BOUNDED,
        pts if lattice == "all" else None, arr.variables, witness,
    )


def chamber_status(arr: Arrangement, sign: SignVector, method: str | None = None, lattice: str = "all") -> Chamber:
    """Realise ``R(sign)`` and classify it; bounded chambers carry their
    lattice points (``lattice="all"``), one witness, or nothing."""
    p = arr.polyhedron(sign)
    kind = kind_of(arr)
    coords = arr.variables
    if not is_feasible(p, method):
        return Chamber(kind, arr.n, sign, EMPTY, coordinates=coords)
    if not is_bounded(p, method):
        return Chamber(kind, arr.n, sign, UNBOUNDED, coordinates=coords)
    return _bounded_chamber(arr, sign, p, lattice)


def _has_orbit_point(arr: Arrangement, ch: Chamber, lattice: str) -> bool:
    if lattice == "none":
        return True
    if not is_integral(arr.lam):
        # no bounded chamber on a non-integral orbit is ever found; if one
        # were, its orbit points would need a shifted lattice search
        raise NotImplementedError("orbit points for non-integral lambda")
    return ch.witness is not None


def _bounded_or_none(arr: Arrangement, sign: SignVector, method: str | None, lattice: str) -> Chamber | None:
    p = arr.polyhedron(sign)
    # cone test first: it depends only on the sign pattern and is cached
    if not recession_cone_trivial(p):
        if method == "both":
            ch = chamber_status(arr, sign, method, "none")
            if ch.status == BOUNDED:
                raise CrossCheckError(f"cone test says unbounded, full check says bounded: {sign}")
        return None
    if not is_feasible(p, method):
        return None
    if method == "both" and not is_bounded(p, "both"):
        raise CrossCheckError(f"cone test says bounded, full check disagrees: {sign}")
    ch = _bounded_chamber(arr, sign, p, lattice)
    return ch if _has_orbit_point(arr, ch, lattice) else None


def all_sign_vectors(arr: Arrangement) -> list[SignVector]:
    signed = arr.signed_variables
    return [SignVector(signed, s) for s in itertools.product((PLUS, MINUS), repeat=len(signed))]


def _lemma_sign(arr: Arrangement) -> str | None:
    """The forced common sign of the framing coordinates, when there is one."""
    if not is_integral(arr.lam):
        return None
    return MINUS if arr.lam >= 1 else PLUS


def _passes_prune(arr: Arrangement, sign: SignVector, forced: str) -> bool:
    return all(s == forced for v, s in zip(sign.variables, sign.signs) if v.startswith("q"))


def _worker(args):
    arr, signs, method, lattice = args
    out = []
    for sv in signs:
        ch = _bounded_or_none(arr, sv, method, lattice)
        if ch is not None:
            out.append(ch)
    return out


def _evaluate(arr: Arrangement, signs: list[SignVector], method: str | None, jobs: int, lattice: str) -> list[Chamber]:
    if jobs <= 1 or len(signs) < 64:
        return _worker((arr, signs, method, lattice))
    size = math.ceil(len(signs) / jobs)
    chunks = [(arr, signs[i:i + size], method, lattice) for i in range(0, len(signs), size)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_worker, chunks))
    return [c for part in parts for c in part]


def enumerate_bounded(
    arr: Arrangement,
    method: str | None = None,
    jobs: int = 1,
    prune: bool = False,
    verify_prune: bool = True,
    lattice: str = "witness",
) -> list[Chamber]:
    """Every bounded chamber meeting the orbit, sorted canonically.

    ``lattice="witness"`` demands one orbit point per chamber (the
    classification condition); ``"all"`` also collects every point and
    ``"none"`` only asks for a bounded nonempty rational chamber.
    All sign vectors are evaluated.  With ``prune`` the framing signs are
    first restricted to the pattern that integrality forces; unless
    ``verify_prune`` is switched off, the skipped vectors are then checked
    too and any bounded chamber among them raises :class:`CrossCheckError`."""
    signs = all_sign_vectors(arr)
    forced = _lemma_sign(arr) if prune else None
    if forced is None:
        found = _evaluate(arr, signs, method, jobs, lattice)
    else:
        keep = [s for s in signs if _passes_prune(arr, s, forced)]
        rest = [s for s in signs if not _passes_prune(arr, s, forced)]
        found = _evaluate(arr, keep, method, jobs, lattice)
        if verify_prune:
            missed = _evaluate(arr, rest, method, jobs, lattice)
            if missed:
                raise CrossCheckError(f"pruning skipped bounded chambers: {[str(c.sign) for c in missed]}")
    found.sort(key=lambda c: c.sign.sort_key())
    log.debug("%s n=%d lambda=%s: %d bounded of %d", kind_of(arr), arr.n, arr.lam, len(found), len(signs))
    return found


def reference_count(n: int, ell: int, w: int, lam) -> int:
    lam = to_rational(lam)
    if not is_integral(lam):
        return 0
    if lam >= (n - 1) * (ell - 1) + w or lam <= -(n - 1) * (ell - 1):
        return math.factorial(n)
    return 0


# ---------------------------------------------------------------------------
# reduction, orderings, symmetric group


def reduced_variables(n: int) -> tuple[str, ...]:
    return tuple(_h(i, j) for i, j in itertools.combinations(range(1, n + 1), 2)) + tuple(
        _q(i) for i in range(1, n + 1)
    )


def reduce_chamber(full: Chamber) -> SignVector:
    """Reduced sign vector of a bounded full chamber: ``h_ij`` takes the sign of
    the first arrow ``i -> j`` and ``q_i`` the sign of the first framing arrow."""
    if full.kind != "full" or full.status != BOUNDED:
        raise ValueError("reduce_chamber needs a bounded nonempty full chamber")
    n = full.n
    sv = full.sign.as_dict()
    names, signs = [], []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        names.append(_h(i, j))
        signs.append(sv[f"v{i}{j}_1"])
    for i in range(1, n + 1):
        key = f"q{i}_1"
        if key in sv:
            names.append(_q(i))
            signs.append(sv[key])
    return SignVector(tuple(names), tuple(signs))


def _hsign(sign: SignVector, i: int, j: int) -> str:
    if i < j:
        return sign[_h(i, j)]
    return _flip(sign[_h(j, i)])


def chamber_to_ordering(sign: SignVector, n: int) -> tuple[int, ...]:
    """Peel off, repeatedly, the unique index that beats every remaining one."""
    remaining = list(range(1, n + 1))
    order = []
    while remaining:
        tops = [i for i in remaining if all(_hsign(sign, i, j) == PLUS for j in remaining if j != i)]
        if len(tops) != 1:
            raise ValueError(f"no unique leading index among {remaining}; not a bounded chamber")
        order.append(tops[0])
        remaining.remove(tops[0])
    return tuple(order)


def sn_act(sigma: Sequence[int], sign: SignVector) -> SignVector:
    """Relabel vertices by ``sigma`` (``sigma[i-1]`` is the image of ``i``)."""
    n = len(sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError("sigma must be a permutation of 1..n")
    new: dict[str, str] = {}
    for i, j in itertools.combinations(range(1, n + 1), 2):
        a, b = sigma[i - 1], sigma[j - 1]
        s = sign[_h(i, j)]
        if a < b:
            new[_h(a, b)] = s
        else:
            new[_h(b, a)] = _flip(s)
    for i in range(1, n + 1):
        s = sign.get(_q(i))
        if s is not None:
            new[_q(sigma[i - 1])] = s
    names = tuple(v for v in sign.variables)
    return SignVector(names, tuple(new[v] for v in names))


def compose(sigma: Sequence[int], order: Sequence[int]) -> tuple[int, ...]:
    return tuple(sigma[i - 1] for i in order)


# ---------------------------------------------------------------------------
# reports


def chamber_json(ch: Chamber) -> dict:
    out: dict = {"signs": ch.sign.as_dict(), "status": ch.status}
    if ch.kind == "reduced" and ch.status == BOUNDED:
        out["ordering"] = list(chamber_to_ordering(ch.sign, ch.n))
    if ch.lattice is not None:
        out["lattice_points"] = [list(p) for p in ch.lattice]
    elif ch.witness is not None:
        out["witness"] = list(ch.witness)
    return out


def report(arr: Arrangement, chambers: Iterable[Chamber]) -> dict:
    chambers = list(chambers)
    if isinstance(arr, ReducedArrangement):
        n, ell, w = arr.n, arr.ell, arr.w
    else:
        n, w = arr.n, arr.w
        ell = arr.slice.quiver.between("1", "2") // 2 + 1
    return {
        "kind": kind_of(arr),
        "n": n,
        "ell": ell,
        "w": w,
        "lambda": fmt(arr.lam),
        "variables": list(arr.variables),
        "count": len(chambers),
        "expected": reference_count(n, ell, w, arr.lam),
        "chambers": [chamber_json(c) for c in chambers],
    }


__all__ = [
    "BOUNDED",
    "EMPTY",
    "UNBOUNDED",
    "Chamber",
    "FullArrangement",
    "ReducedArrangement",
    "SignVector",
    "all_sign_vectors",
    "build_full",
    "build_reduced",
    "chamber_status",
    "chamber_to_ordering",
    "compose",
    "enumerate_bounded",
    "minimal_slice",
    "reduce_chamber",
    "reduced_variables",
    "reference_count",
    "report",
    "sn_act",
]
