"""Crawley-Boevey criteria, representation types and leaf combinatorics.

The leaf layer (relevance, boundaries, slices) is specialised to the flower
quiver: one vertex ``"0"`` with ``ell`` loops, framed by ``w``, extended by
the vertex ``"inf"``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .rootlat import (
    INFINITY,
    Character,
    DimVector,
    FramedSetting,
    Quiver,
    _is_root,
    _roots_below,
    extend,
    p_form,
    positive_roots_below,
)
from .exact import to_rational


# ---------------------------------------------------------------------------
# decompositions into positive roots


def _p(q: Quiver, x: tuple[int, ...]) -> int:
    return p_form(q, DimVector(q.vertices, x))


def _pair(lam: tuple[Fraction, ...] | None, x: tuple[int, ...]) -> Fraction:
    if lam is None:
        return Fraction(0)
    return sum((a * b for a, b in zip(lam, x)), Fraction(0))


@lru_cache(maxsize=None)
def _best_sum(q: Quiver, x: tuple[int, ...], lam: tuple[Fraction, ...] | None) -> int | None:
    """Max of sum p(beta) over decompositions of x into >= 1 admissible roots."""
    if not any(x):
        return 0
    best = None
    for beta in _roots_below(q, x):
        if _pair(lam, beta) != 0:
            continue
        rest = tuple(a - b for a, b in zip(x, beta))
        tail = _best_sum(q, rest, lam)
        if tail is None:
            continue
        cand = _p(q, beta) + tail
        if best is None or cand > best:
            best = cand
    return best


def max_split(q: Quiver, v: DimVector, lam: Character | None = None) -> int | None:
    """Largest ``sum p(beta_i)`` over splittings of ``v`` into at least two
    positive roots (each orthogonal to ``lam`` when given); ``None`` if ``v``
    admits no such splitting."""
    lam_t = None if lam is None else lam.values
    x = v.values
    best = None
    for beta in _roots_below(q, x):
        if beta == x or _pair(lam_t, beta) != 0:
            continue
        rest = tuple(a - b for a, b in zip(x, beta))
        tail = _best_sum(q, rest, lam_t)
        if tail is None:
            continue
        cand = _p(q, beta) + tail
        if best is None or cand > best:
            best = cand
    return best


def _criterion(q: Quiver, v: DimVector, lam: Character | None, strict: bool) -> bool:
    split = max_split(q, v, lam)
    if split is None:
        return True
    pv = p_form(q, v)
    return pv > split if strict else pv >= split


def simple_rep_exists(q: Quiver, lam: Character, v: DimVector) -> bool:
    """Whether a simple representation of dimension ``v`` lies over ``lam``."""
    if v.is_zero():
        raise ValueError("zero dimension vector")
    if not _is_root(q, v.values):
        return False
    if lam.pair(v) != 0:
        return False
    return _criterion(q, v, lam, strict=True)


def moment_map_flat(s: FramedSetting) -> bool:
    qx, vx = extend(s)
    return _criterion(qx, vx, None, strict=False)


# ---------------------------------------------------------------------------
# representation types


@dataclass(frozen=True)
class RepresentationType:
    """``(v0, 1; v1, m1; ...)`` on an extended quiver; part 0 carries ``inf``."""

    quiver: Quiver
    parts: tuple[tuple[DimVector, int], ...]

    def __post_init__(self) -> None:
        parts = tuple((root, int(m)) for root, m in self.parts)
        if not parts:
            raise ValueError("a representation type has at least one part")
        head, m0 = parts[0]
        if INFINITY not in self.quiver.vertices:
            raise ValueError("representation types live on an extended quiver")
        if head[INFINITY] != 1 or m0 != 1:
            raise ValueError("part 0 must have inf-component 1 and multiplicity 1")
        for root, m in parts[1:]:
            if root[INFINITY] != 0:
                raise ValueError("only part 0 may touch the framing vertex")
            if m < 1:
                raise ValueError("multiplicities are positive")
        rest = tuple(sorted(parts[1:], key=lambda pm: (pm[0].values, pm[1])))
        object.__setattr__(self, "parts", (parts[0],) + rest)

    @property
    def total(self) -> DimVector:
        acc = DimVector.zero(self.quiver)
        for root, m in self.parts:
            acc = acc + root * m
        return acc

    @property
    def k(self) -> int:
        return len(self.parts) - 1

    def to_json(self) -> list[dict]:
        return [{"root": root.as_dict(), "mult": m} for root, m in self.parts]

    def __str__(self) -> str:
        return "; ".join(f"{root},{m}" for root, m in self.parts)


def stratum_dim(tau: RepresentationType) -> int:
    return 2 * sum(p_form(tau.quiver, root) for root, _ in tau.parts)


def _multiset_splits(items, target, start, counts, rigid):
    """Yield lists of (root, mult) with sum mult*root == target."""
    if not any(target):
        yield []
        return
    for idx in range(start, len(items)):
        root, m = items[idx]
        if any(m * r > t for r, t in zip(root, target)):
            continue
        if rigid[root] and counts.get(root, 0):
            continue
        counts[root] = counts.get(root, 0) + 1
        rest = tuple(t - m * r for r, t in zip(root, target))
        for tail in _multiset_splits(items, rest, idx, counts, rigid):
            yield [(root, m)] + tail
        counts[root] -= 1


def enumerate_rep_types(s: FramedSetting) -> list[RepresentationType]:
    """Every representation type of the ``lambda = 0`` affine quiver variety.

    A root with ``p = 0`` has a unique simple of that dimension, so it occurs
    in at most one part; roots with ``p > 0`` may label several parts."""
    qx, vx = extend(s)
    zero = Character.zero(qx)
    inf = qx.index(INFINITY)
    simple = [
        r for r in _roots_below(qx, vx.values)
        if simple_rep_exists(qx, zero, DimVector(qx.vertices, r))
    ]
    heads = [r for r in simple if r[inf] == 1]
    tails = [r for r in simple if r[inf] == 0]
    rigid = {r: _p(qx, r) == 0 for r in tails}
    out = []
    for head in heads:
        rest = tuple(a - b for a, b in zip(vx.values, head))
        items = []
        for r in tails:
            top = min((t // x for x, t in zip(r, rest) if x), default=0)
            items.extend((r, m) for m in range(1, top + 1))
        items.sort()
        for split in _multiset_splits(items, rest, 0, {}, rigid):
            parts = [(DimVector(qx.vertices, head), 1)]
            parts += [(DimVector(qx.vertices, r), m) for r, m in split]
            out.append(RepresentationType(qx, tuple(parts)))
    out.sort(key=_type_order)
    return out


def _type_order(tau: RepresentationType):
    head = tau.parts[0][0].values
    return (tuple(-x for x in head), tuple((r.values, m) for r, m in tau.parts[1:]))


# ---------------------------------------------------------------------------
# flower leaves


@dataclass(frozen=True)
class FlowerLeafSpec:
    """``(alpha_inf + n0 alpha, 1; n1 alpha, m1; ...)`` over the flower quiver."""

    n: int
    ell: int
    w: int
    n0: int
    parts: tuple[int, ...] = ()
    mults: tuple[int, ...] | None = field(default=None)

    def __post_init__(self) -> None:
        parts = tuple(int(x) for x in self.parts)
        mults = tuple(1 for _ in parts) if self.mults is None else tuple(int(m) for m in self.mults)
        if len(mults) != len(parts):
            raise ValueError("one multiplicity per part")
        if any(x < 1 for x in parts) or any(m < 1 for m in mults):
            raise ValueError("parts and multiplicities are positive")
        if self.n0 < 0 or self.ell < 1 or self.w < 0:
            raise ValueError("invalid flower parameters")
        if self.n0 + sum(x * m for x, m in zip(parts, mults)) != self.n:
            raise ValueError("parts do not add up to n")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "mults", mults)

    @property
    def k(self) -> int:
        return len(self.parts)

    @classmethod
    def minimal(cls, n: int, ell: int, w: int) -> "FlowerLeafSpec":
        return cls(n, ell, w, 0, (1,) * n)

    @classmethod
    def open_leaf(cls, n: int, ell: int, w: int) -> "FlowerLeafSpec":
        return cls(n, ell, w, n, ())


def flower_extended(ell: int, w: int) -> Quiver:
    return extend(FramedSetting.flower(ell, 0, w))[0]


def flower_type(spec: FlowerLeafSpec) -> RepresentationType:
    qx = flower_extended(spec.ell, spec.w)
    parts = [(DimVector.on(qx, {"0": spec.n0, INFINITY: 1}), 1)]
    parts += [(DimVector.on(qx, {"0": x}), m) for x, m in zip(spec.parts, spec.mults)]
    return RepresentationType(qx, tuple(parts))


def _flower_params(tau: RepresentationType) -> tuple[int, int]:
    q = tau.quiver
    if q.vertices != ("0", INFINITY):
        raise ValueError("leaf combinatorics is defined for the extended flower quiver")
    return q.loops_at("0"), q.between("0", INFINITY)


def leaf_spec(tau: RepresentationType) -> FlowerLeafSpec:
    ell, w = _flower_params(tau)
    head = tau.parts[0][0]
    parts = tuple(root["0"] for root, _ in tau.parts[1:])
    mults = tuple(m for _, m in tau.parts[1:])
    return FlowerLeafSpec(tau.total["0"], ell, w, head["0"], parts, mults)


def is_relevant(tau: RepresentationType) -> bool:
    _flower_params(tau)
    return all(m == 1 for _, m in tau.parts)


def relevant_leaf_dim(spec: FlowerLeafSpec) -> int:
    if any(m != 1 for m in spec.mults):
        raise ValueError("closed form needs every multiplicity equal to 1")
    squares = spec.n0 ** 2 + sum(x * x for x in spec.parts)
    return 2 * spec.k + 2 * spec.n0 * spec.w + (2 * spec.ell - 2) * squares


def relevantize(tau: RepresentationType) -> RepresentationType:
    """Split every ``(root, m)`` into ``m`` copies of ``(root, 1)``."""
    parts = [tau.parts[0]]
    for root, m in tau.parts[1:]:
        parts.extend([(root, 1)] * m)
    return RepresentationType(tau.quiver, tuple(parts))


def _groupings(pieces: Sequence[int], targets: list[int], idx: int = 0) -> bool:
    """Can pieces[idx:] be dealt into the labelled blocks so each hits 0 remaining?"""
    if idx == len(pieces):
        return all(t == 0 for t in targets)
    r = pieces[idx]
    tried = set()
    for b, t in enumerate(targets):
        # blocks with equal remaining capacity are interchangeable only if both are >0 blocks
        key = (t, b == 0)
        if r > t or key in tried:
            continue
        tried.add(key)
        targets[b] -= r
        if _groupings(pieces, targets, idx + 1):
            targets[b] += r
            return True
        targets[b] += r
    return False


def in_boundary(tau: RepresentationType, tau_prime: RepresentationType) -> bool:
    """Does the relevant leaf of ``tau_prime`` sit in the boundary of ``tau``'s?"""
    if not (is_relevant(tau) and is_relevant(tau_prime)):
        raise ValueError("in_boundary compares relevant types; relevantize first")
    a, b = leaf_spec(tau), leaf_spec(tau_prime)
    if (a.n, a.ell, a.w) != (b.n, b.ell, b.w):
        raise ValueError("types come from different flower settings")
    if tau == tau_prime:
        return False
    if b.n0 > a.n0:
        return False
    targets = [a.n0 - b.n0] + list(a.parts)
    # blocks 1..k are nonempty automatically: their targets are positive
    return _groupings(sorted(b.parts, reverse=True), targets)


def in_closure_boundary(tau: RepresentationType, other: RepresentationType) -> bool:
    """``L_other`` lies in the boundary of ``L_tau`` for relevant ``tau`` and any ``other``."""
    if other == tau:
        return False
    rel = relevantize(other)
    return rel == tau or in_boundary(tau, rel)


def min_boundary_codim(tau: RepresentationType, all_types: Iterable[RepresentationType]) -> int | None:
    if not is_relevant(tau):
        raise ValueError("boundary codimension is computed for relevant leaves")
    d = stratum_dim(tau)
    codims = [d - stratum_dim(o) for o in all_types if in_closure_boundary(tau, o)]
    return min(codims) if codims else None


# ---------------------------------------------------------------------------
# slices


@dataclass(frozen=True)
class SliceQuiverData:
    quiver: Quiver
    v: DimVector
    w: DimVector
    loop_counts: tuple[int, ...]
    loops_removed: bool

    def to_json(self) -> dict:
        return {
            "quiver": self.quiver.to_json(),
            "v": self.v.as_dict(),
            "w": self.w.as_dict(),
            "loop_counts": list(self.loop_counts),
            "loops_removed": self.loops_removed,
        }


def slice_quiver(tau: RepresentationType) -> SliceQuiverData:
    """Slice quiver: one vertex per non-zeroth part, ``-(v^i, v^j)`` arrows
    between distinct vertices split as evenly as possible between the two
    directions, ``p(v^i)`` loops.  Loops are dropped when every slice
    dimension is 1 since they then only contribute a flat factor."""
    from .rootlat import tits_form

    q = tau.quiver
    head = tau.parts[0][0]
    rest = tau.parts[1:]
    labels = tuple(str(i) for i in range(1, len(rest) + 1))
    loops = tuple(p_form(q, root) for root, _ in rest)
    v = tuple(m for _, m in rest)
    w = tuple(-tits_form(q, head, root) for root, _ in rest)
    remove = all(m == 1 for m in v)
    arrows: list[tuple[str, str]] = []
    for i, j in itertools.combinations(range(len(rest)), 2):
        c = -tits_form(q, rest[i][0], rest[j][0])
        arrows += [(labels[i], labels[j])] * ((c + 1) // 2)
        arrows += [(labels[j], labels[i])] * (c // 2)
    if not remove:
        for i, c in enumerate(loops):
            arrows += [(labels[i], labels[i])] * c
    sq = Quiver(labels, tuple(arrows))
    return SliceQuiverData(sq, DimVector(labels, v), DimVector(labels, w), loops, remove)


def restrict_parameter(lam, spec: FlowerLeafSpec) -> Character:
    """Quantization parameter seen by the slice: ``r(lam)`` on slice vertices.

    Computed as the restricted character ``(lam + w/2) tr`` on the stabiliser
    torus minus half the framing character of the slice."""
    lam = to_rational(lam)
    if any(m != 1 for m in spec.mults):
        raise ValueError("the torus formula assumes a relevant leaf")
    sl = slice_quiver(flower_type(spec))
    half_w = Fraction(spec.w, 2)
    values = [(lam + half_w) * ni - Fraction(wi, 2) for ni, wi in zip(spec.parts, sl.w.values)]
    return Character(sl.quiver.vertices, tuple(values))


__all__ = [
    "FlowerLeafSpec",
    "RepresentationType",
    "SliceQuiverData",
    "enumerate_rep_types",
    "flower_type",
    "in_boundary",
    "in_closure_boundary",
    "is_relevant",
    "leaf_spec",
    "max_split",
    "min_boundary_codim",
    "moment_map_flat",
    "positive_roots_below",
    "relevant_leaf_dim",
    "relevantize",
    "restrict_parameter",
    "simple_rep_exists",
    "slice_quiver",
    "stratum_dim",
]
